#include "icm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace icm {

void ExactConfig::validate() const {
    if (max_players_exact < 1) throw std::invalid_argument("ExactConfig: max_players_exact must be >= 1");
    if (max_players_exact > kSubsetDpMaxPlayers)
        throw std::invalid_argument("ExactConfig: max_players_exact above " +
                                    std::to_string(kSubsetDpMaxPlayers));
}

FinishMatrix finish_probabilities_naive(const StackDistribution& stacks) {
    const std::size_t n = stacks.player_count();
    if (n > kNaiveMaxPlayers)
        throw TooManyPlayersError("finish_probabilities_naive: " + std::to_string(n) +
                                  " players exceeds the enumeration bound of " +
                                  std::to_string(kNaiveMaxPlayers));
    const auto& x = stacks.fractions();
    std::vector<double> probs(n * n, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    do {
        double p = 1.0;
        for (std::size_t place = 0; place + 1 < n; ++place) {
            // Chips still in play, summed directly rather than as 1 - placed.
            double remaining = 0.0;
            for (std::size_t k = place; k < n; ++k) remaining += x[order[k]];
            p *= x[order[place]] / remaining;
        }
        // The last player standing finishes last with certainty.
        for (std::size_t place = 0; place < n; ++place) probs[order[place] * n + place] += p;
    } while (std::next_permutation(order.begin(), order.end()));
    return FinishMatrix(n, std::move(probs));
}

FinishMatrix finish_probabilities(const StackDistribution& stacks, const ExactConfig& cfg) {
    cfg.validate();
    const std::size_t n = stacks.player_count();
    if (n > cfg.max_players_exact)
        throw TooManyPlayersError("finish_probabilities: " + std::to_string(n) +
                                  " players exceeds the exact cutoff of " +
                                  std::to_string(cfg.max_players_exact));
    if (cfg.engine == ExactEngine::naive_enumeration) return finish_probabilities_naive(stacks);

    const auto& x = stacks.fractions();
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;

    // placed_sum[S] = sum of x over S, built from the lowest set bit.
    std::vector<double> placed_sum(std::size_t{full} + 1, 0.0);
    for (std::uint32_t s = 1; s <= full; ++s) {
        const int low = std::countr_zero(s);
        placed_sum[s] = placed_sum[s & (s - 1)] + x[low];
    }

    std::vector<double> g(std::size_t{full} + 1, 0.0);
    g[0] = 1.0;
    std::vector<double> probs(n * n, 0.0);
    for (std::uint32_t s = 0; s < full; ++s) {
        const double gs = g[s];
        if (gs == 0.0) continue;
        const std::uint32_t unplaced = full ^ s;
        const std::size_t place = static_cast<std::size_t>(std::popcount(s));
        const double remaining = placed_sum[unplaced];
        const bool last = std::popcount(unplaced) == 1;
        for (std::uint32_t rest = unplaced; rest != 0; rest &= rest - 1) {
            const int i = std::countr_zero(rest);
            const double term = last ? gs : gs * (x[i] / remaining);
            probs[static_cast<std::size_t>(i) * n + place] += term;
            g[s | (std::uint32_t{1} << i)] += term;
        }
    }
    return FinishMatrix(n, std::move(probs));
}

EquityVector equity_from_matrix(const FinishMatrix& matrix, const PayoutLadder& payouts) {
    const std::size_t n = matrix.size();
    if (payouts.size() != n)
        throw std::invalid_argument("icm_equity: payout ladder has " + std::to_string(payouts.size()) +
                                    " places for " + std::to_string(n) + " players");
    std::vector<double> equities(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < n; ++j) e += matrix(i, j) * payouts[j];
        equities[i] = e;
    }
    return EquityVector(std::move(equities), std::nullopt, payouts);
}

EquityVector icm_equity(const StackDistribution& stacks, const PayoutLadder& payouts,
                        const ExactConfig& cfg) {
    if (payouts.size() != stacks.player_count())
        throw std::invalid_argument("icm_equity: payout ladder has " + std::to_string(payouts.size()) +
                                    " places for " + std::to_string(stacks.player_count()) +
                                    " players");
    return equity_from_matrix(finish_probabilities(stacks, cfg), payouts);
}

}  // namespace icm
