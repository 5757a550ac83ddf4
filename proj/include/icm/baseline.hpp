#pragma once

#include <span>

#include "icm/model.hpp"

namespace icm {

/// Rank-order estimator: the biggest stack is credited first prize, the
/// second biggest second prize, and so on. Equal stacks keep input order.
EquityVector baseline_equity(std::span<const Chips> chips, const PayoutLadder& payouts);

}  // namespace icm
