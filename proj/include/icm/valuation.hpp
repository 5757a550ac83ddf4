#pragma once

#include <cstddef>

#include "icm/exact.hpp"
#include "icm/monte_carlo.hpp"

namespace icm {

enum class EquityMethod { exact, monte_carlo, automatic };

struct Valuation {
    EquityVector equity;
    bool sampled = false;
    std::size_t simulations = 0;
};

/// Exact ICM up to cfg.max_players_exact players, Monte Carlo beyond it
/// (for `automatic`); `exact` and `monte_carlo` force one engine.
Valuation value_stacks(const StackDistribution& stacks, const PayoutLadder& payouts,
                       const ExactConfig& exact_cfg, const McConfig& mc_cfg,
                       EquityMethod method = EquityMethod::automatic);

}  // namespace icm
