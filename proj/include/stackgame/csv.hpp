#pragma once
// Minimal CSV emission with a versioned header comment and shortest
// round-trip number formatting, so identical runs give identical bytes.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stackgame {

inline constexpr std::string_view kCsvSchemaLine = "# stackgame-csv v1";

inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
    os_ << kCsvSchemaLine << '\n';
    width_ = header.size();
    for (const auto& h : header) field(h);
    end_row();
  }

  CsvWriter& field(std::string_view s) {
    if (col_++ > 0) os_ << ',';
    os_ << s;
    return *this;
  }
  CsvWriter& field(double x) { return field(format_number(x)); }
  CsvWriter& field(std::int64_t x) { return field(std::to_string(x)); }
  CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& field(std::size_t x) { return field(std::to_string(x)); }

  void end_row() {
    if (col_ != width_) throw std::logic_error("csv row width differs from header");
    os_ << '\n';
    col_ = 0;
  }

 private:
  std::ostream& os_;
  std::size_t width_ = 0;
  std::size_t col_ = 0;
};

}  // namespace stackgame
