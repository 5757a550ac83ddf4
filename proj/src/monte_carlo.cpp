#include "icm/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace icm {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

void McConfig::validate() const {
    if (!(se_tolerance > 0.0) || !std::isfinite(se_tolerance))
        throw std::invalid_argument("McConfig: se_tolerance must be > 0");
    if (min_sims == 0 || min_sims > max_sims)
        throw std::invalid_argument("McConfig: require 0 < min_sims <= max_sims");
    if (batch_size == 0) throw std::invalid_argument("McConfig: batch_size must be >= 1");
}

namespace {

void draw_order(const std::vector<double>& x, CounterRng& rng, std::vector<std::size_t>& remaining,
                std::vector<std::size_t>& order) {
    const std::size_t n = x.size();
    remaining.resize(n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    order.clear();
    for (std::size_t left = n; left > 1; --left) {
        double mass = 0.0;
        for (std::size_t k = 0; k < left; ++k) mass += x[remaining[k]];
        const double u = rng.uniform() * mass;
        // Rounding can leave u past the final cumulative sum; the last
        // candidate absorbs it.
        std::size_t pick = left - 1;
        double cumulative = 0.0;
        for (std::size_t k = 0; k + 1 < left; ++k) {
            cumulative += x[remaining[k]];
            if (u < cumulative) {
                pick = k;
                break;
            }
        }
        order.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    order.push_back(remaining.front());
}

double standard_error(double sum, double sum_sq, std::size_t m) {
    if (m < 2) return 0.0;
    const double mean = sum / static_cast<double>(m);
    const double var = std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(m - 1));
    return std::sqrt(var / static_cast<double>(m));
}

// Runs the batch loop shared by both estimators. `record` receives each
// sampled order; `max_se` reports the current largest standard error.
template <typename Record, typename MaxSe>
std::size_t run_batches(const StackDistribution& stacks, const McConfig& cfg, Record&& record,
                        MaxSe&& max_se) {
    cfg.validate();
    std::vector<std::size_t> remaining, order;
    std::size_t m = 0;
    for (std::uint64_t batch = 0;; ++batch) {
        CounterRng rng(cfg.seed, batch);
        const std::size_t count = std::min(cfg.batch_size, cfg.max_sims - m);
        for (std::size_t s = 0; s < count; ++s) {
            draw_order(stacks.fractions(), rng, remaining, order);
            record(order);
        }
        m += count;
        if (m >= cfg.max_sims) break;
        if (m >= cfg.min_sims && max_se(m) < cfg.se_tolerance) break;
    }
    return m;
}

}  // namespace

std::vector<std::size_t> sample_finish_order(const StackDistribution& stacks, CounterRng& rng) {
    std::vector<std::size_t> remaining, order;
    draw_order(stacks.fractions(), rng, remaining, order);
    return order;
}

McEquity icm_equity_mc(const StackDistribution& stacks, const PayoutLadder& payouts,
                       const McConfig& cfg) {
    const std::size_t n = stacks.player_count();
    if (payouts.size() != n)
        throw std::invalid_argument("icm_equity_mc: payout ladder size does not match player count");

    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
    auto record = [&](const std::vector<std::size_t>& order) {
        for (std::size_t place = 0; place < n; ++place) {
            const double prize = payouts[place];
            sum[order[place]] += prize;
            sum_sq[order[place]] += prize * prize;
        }
    };
    auto max_se = [&](std::size_t m) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, standard_error(sum[i], sum_sq[i], m));
        return worst;
    };
    const std::size_t m = run_batches(stacks, cfg, record, max_se);

    std::vector<double> means(n), ses(n);
    for (std::size_t i = 0; i < n; ++i) {
        means[i] = sum[i] / static_cast<double>(m);
        ses[i] = standard_error(sum[i], sum_sq[i], m);
    }
    return {EquityVector(std::move(means), std::move(ses), payouts), m};
}

McFinishMatrix finish_frequencies_mc(const StackDistribution& stacks, const McConfig& cfg) {
    const std::size_t n = stacks.player_count();
    std::vector<double> counts(n * n, 0.0);
    auto record = [&](const std::vector<std::size_t>& order) {
        for (std::size_t place = 0; place < n; ++place) counts[order[place] * n + place] += 1.0;
    };
    // Indicator variables: sum == sum of squares.
    auto max_se = [&](std::size_t m) {
        double worst = 0.0;
        for (double c : counts) worst = std::max(worst, standard_error(c, c, m));
        return worst;
    };
    const std::size_t m = run_batches(stacks, cfg, record, max_se);

    std::vector<double> freq(n * n), ses(n * n);
    for (std::size_t k = 0; k < n * n; ++k) {
        freq[k] = counts[k] / static_cast<double>(m);
        ses[k] = standard_error(counts[k], counts[k], m);
    }
    return {FinishMatrix(n, std::move(freq)), std::move(ses), m};
}

}  // namespace icm
