#include "icm/baseline.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace icm {

EquityVector baseline_equity(std::span<const Chips> chips, const PayoutLadder& payouts) {
    const std::size_t n = chips.size();
    if (n == 0 || payouts.size() != n)
        throw std::invalid_argument("baseline_equity: payout ladder has " + std::to_string(payouts.size()) +
                                    " places for " + std::to_string(n) + " players");
    for (Chips c : chips) {
        if (c <= 0) throw InvariantError("baseline_equity: chip counts must be positive");
    }
    std::vector<std::size_t> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
    std::stable_sort(by_rank.begin(), by_rank.end(),
                     [&](std::size_t a, std::size_t b) { return chips[a] > chips[b]; });
    std::vector<double> equities(n);
    for (std::size_t rank = 0; rank < n; ++rank) equities[by_rank[rank]] = payouts[rank];
    return EquityVector(std::move(equities), std::nullopt, payouts);
}

}  // namespace icm
