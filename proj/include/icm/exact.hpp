#pragma once

#include <cstddef>
#include <stdexcept>

#include "icm/model.hpp"

namespace icm {

/// Thrown when a stack vector is too large for the requested exact engine.
/// Callers are expected to fall back to the Monte Carlo estimator.
class TooManyPlayersError : public std::length_error {
public:
    using std::length_error::length_error;
};

enum class ExactEngine { naive_enumeration, subset_dp, automatic };

struct ExactConfig {
    std::size_t max_players_exact = 10;
    ExactEngine engine = ExactEngine::automatic;

    void validate() const;
};

/// Largest field the permutation oracle accepts (n! orderings).
inline constexpr std::size_t kNaiveMaxPlayers = 7;
/// Hard ceiling for the subset DP regardless of configuration (2^n tables).
inline constexpr std::size_t kSubsetDpMaxPlayers = 24;

/// Sums the probability of every finishing order, place by place. Kept as
/// the reference oracle for the subset DP.
FinishMatrix finish_probabilities_naive(const StackDistribution& stacks);

/// Finish matrix via dynamic programming over the set of players already
/// placed. g(S) is the probability that exactly the players in S occupy the
/// top |S| places; extending S by i contributes g(S) * x_i / (1 - sum_S x)
/// to P(i finishes |S|+1). O(2^n * n).
FinishMatrix finish_probabilities(const StackDistribution& stacks, const ExactConfig& cfg = {});

/// equity[i] = sum_j P(i, j) * prizes[j]. The ladder must have one entry per
/// player (see normalize_payouts).
EquityVector icm_equity(const StackDistribution& stacks, const PayoutLadder& payouts,
                        const ExactConfig& cfg = {});

/// Dot product of a finish matrix with a ladder of the same size.
EquityVector equity_from_matrix(const FinishMatrix& matrix, const PayoutLadder& payouts);

}  // namespace icm
