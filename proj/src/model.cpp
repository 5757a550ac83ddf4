#include "icm/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace icm {

namespace {

double sum_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0);
}

[[noreturn]] void reject(const std::string& what) { throw InvariantError(what); }

}  // namespace

StackDistribution::StackDistribution(std::vector<double> fractions)
    : fractions_(std::move(fractions)) {
    if (fractions_.empty()) reject("StackDistribution: no players");
    for (double f : fractions_) {
        if (!std::isfinite(f) || f <= 0.0 || f > 1.0)
            reject("StackDistribution: every share must lie in (0, 1]");
    }
    if (std::abs(sum_of(fractions_) - 1.0) > kSumTolerance)
        reject("StackDistribution: shares must sum to 1");
}

StackDistribution normalize_stacks(std::span<const Chips> chips) {
    if (chips.empty()) reject("normalize_stacks: empty input");
    // Accumulate in long double; real chip totals stay far below 2^63.
    long double total = 0;
    for (Chips c : chips) {
        if (c <= 0) reject("normalize_stacks: chip counts must be positive");
        total += static_cast<long double>(c);
    }
    std::vector<double> fractions;
    fractions.reserve(chips.size());
    for (Chips c : chips) fractions.push_back(static_cast<double>(c / total));
    return StackDistribution(std::move(fractions));
}

PayoutLadder::PayoutLadder(std::vector<double> prizes, bool normalized)
    : prizes_(std::move(prizes)), normalized_(normalized) {
    if (prizes_.empty()) reject("PayoutLadder: no places");
    for (double p : prizes_) {
        if (!std::isfinite(p) || p < 0.0) reject("PayoutLadder: prizes must be finite and >= 0");
    }
    total_ = sum_of(prizes_);
    if (normalized_ && std::abs(total_ - 1.0) > kSumTolerance)
        reject("PayoutLadder: normalized ladder must sum to 1");
    for (std::size_t j = 1; j < prizes_.size(); ++j) {
        if (prizes_[j] > prizes_[j - 1]) {
            monotone_ = false;
            std::ostringstream msg;
            msg << "place " << (j + 1) << " pays more than place " << j;
            warnings_.push_back(msg.str());
        }
    }
}

double PayoutLadder::max_prize() const noexcept {
    return *std::max_element(prizes_.begin(), prizes_.end());
}

PayoutLadder normalize_payouts(std::span<const double> prizes, std::size_t n_players) {
    if (n_players == 0) reject("normalize_payouts: n_players must be >= 1");
    if (prizes.empty()) reject("normalize_payouts: no prizes");
    std::vector<double> ladder(n_players, 0.0);
    const std::size_t kept = std::min(n_players, prizes.size());
    std::copy_n(prizes.begin(), kept, ladder.begin());
    double total = 0.0;
    for (double p : ladder) {
        if (!std::isfinite(p) || p < 0.0) reject("normalize_payouts: prizes must be finite and >= 0");
        total += p;
    }
    if (total <= 0.0) reject("normalize_payouts: relevant prizes sum to zero");
    for (double& p : ladder) p /= total;
    return PayoutLadder(std::move(ladder), true);
}

FinishMatrix::FinishMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
    if (n_ == 0 || data_.size() != n_ * n_) reject("FinishMatrix: expected a non-empty n x n matrix");
    for (double p : data_) {
        if (!std::isfinite(p) || p < -kSumTolerance || p > 1.0 + kSumTolerance)
            reject("FinishMatrix: probabilities must lie in [0, 1]");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            row += data_[i * n_ + j];
            col += data_[j * n_ + i];
        }
        if (std::abs(row - 1.0) > kSumTolerance) reject("FinishMatrix: row does not sum to 1");
        if (std::abs(col - 1.0) > kSumTolerance) reject("FinishMatrix: column does not sum to 1");
    }
}

EquityVector::EquityVector(std::vector<double> equities,
                           std::optional<std::vector<double>> standard_errors,
                           const PayoutLadder& ladder)
    : equities_(std::move(equities)), standard_errors_(std::move(standard_errors)) {
    if (equities_.empty()) reject("EquityVector: no players");
    const double max_prize = ladder.max_prize();
    for (double e : equities_) {
        if (!std::isfinite(e) || e < -kSumTolerance || e > max_prize + kSumTolerance)
            reject("EquityVector: equity outside [0, max prize]");
    }
    double tolerance = kSumTolerance;
    if (standard_errors_) {
        if (standard_errors_->size() != equities_.size())
            reject("EquityVector: one standard error per player required");
        for (double s : *standard_errors_) {
            if (!std::isfinite(s) || s < 0.0) reject("EquityVector: standard errors must be >= 0");
        }
        tolerance = std::max(tolerance, 4.0 * sum_of(*standard_errors_));
    }
    double expected = 0.0;
    for (std::size_t j = 0; j < std::min(ladder.size(), equities_.size()); ++j) expected += ladder[j];
    if (std::abs(sum_of(equities_) - expected) > tolerance)
        reject("EquityVector: equities do not sum to the prizes on offer");
}

SnapshotRecord::SnapshotRecord(std::string event_id, std::string day_label,
                               std::vector<SnapshotPlayer> players, std::vector<double> targets,
                               std::vector<int> places)
    : event_id_(std::move(event_id)),
      day_label_(std::move(day_label)),
      players_(std::move(players)),
      targets_(std::move(targets)),
      places_(std::move(places)) {
    if (players_.size() < 2) reject("SnapshotRecord: at least 2 players required");
    if (targets_.size() != players_.size()) reject("SnapshotRecord: one target per player required");
    for (const auto& p : players_) {
        if (p.chips <= 0) reject("SnapshotRecord: chip counts must be positive");
    }
    for (double t : targets_) {
        if (!std::isfinite(t) || t < 0.0) reject("SnapshotRecord: targets must be >= 0");
    }
    if (std::abs(sum_of(targets_) - 1.0) > kSumTolerance)
        reject("SnapshotRecord: targets must sum to 1");
    if (!places_.empty()) {
        if (places_.size() != players_.size()) reject("SnapshotRecord: one place per player required");
        std::vector<int> sorted = places_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            if (sorted[k] != static_cast<int>(k + 1)) reject("SnapshotRecord: places must be 1..n");
        }
    }
}

PayoutLadder SnapshotRecord::ladder() const {
    std::vector<double> prizes(targets_.size());
    if (places_.empty()) {
        prizes = targets_;
        std::sort(prizes.begin(), prizes.end(), std::greater<>());
    } else {
        for (std::size_t k = 0; k < targets_.size(); ++k) prizes[places_[k] - 1] = targets_[k];
    }
    return PayoutLadder(std::move(prizes), true);
}

std::vector<Chips> SnapshotRecord::chips() const {
    std::vector<Chips> out;
    out.reserve(players_.size());
    for (const auto& p : players_) out.push_back(p.chips);
    return out;
}

}  // namespace icm
