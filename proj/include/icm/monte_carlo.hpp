#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "icm/model.hpp"

namespace icm {

/// Counter-based generator: output k of stream (seed, stream) is a pure
/// function of (seed, stream, k), so any batch can be regenerated
/// independently of the others. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

struct McConfig {
    double se_tolerance = 0.001;
    std::size_t max_sims = 10000;
    std::size_t min_sims = 100;
    std::size_t batch_size = 100;
    std::uint64_t seed = 0x1CE5EED;

    void validate() const;
};

/// Draws a complete finishing order (index 0 = winner). Each place goes to a
/// remaining player with probability proportional to their share of the
/// chips still in play.
std::vector<std::size_t> sample_finish_order(const StackDistribution& stacks, CounterRng& rng);

struct McEquity {
    EquityVector equity;
    std::size_t simulations = 0;
};

/// Sampled ICM equity. Simulations run in batches; once at least min_sims
/// have run, the batch loop stops as soon as every player's standard error
/// of mean prize is below se_tolerance, or max_sims is reached. Batch b
/// draws from CounterRng(seed, b), so results depend only on (inputs, cfg).
McEquity icm_equity_mc(const StackDistribution& stacks, const PayoutLadder& payouts,
                       const McConfig& cfg = {});

struct McFinishMatrix {
    FinishMatrix frequencies;
    std::vector<double> standard_errors;  // row-major, per (player, place)
    std::size_t simulations = 0;
};

/// Empirical finish-place frequencies under the same stopping rule, applied
/// to the largest per-entry standard error.
McFinishMatrix finish_frequencies_mc(const StackDistribution& stacks, const McConfig& cfg = {});

}  // namespace icm
