#pragma once

#include "stackgame/core.hpp"

namespace stackgame {

/// Two states, scalar actions in [0, 1], coupled constraint and
/// action-dependent transitions; |r| <= 1.
StochasticGame make_toy_game(double discount = 0.9);

/// Three states with cyclic action-dependent transitions; |r| <= 1.
StochasticGame make_three_state_game(double discount = 0.9);

}  // namespace stackgame
