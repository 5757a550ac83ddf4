#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace icm {

/// Raised when a domain type would be constructed with violated invariants.
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kSumTolerance = 1e-9;

using Chips = std::int64_t;

/// Chip shares of the players still in the tournament. Every share is
/// strictly positive and the shares sum to one.
class StackDistribution {
public:
    /// Validates `fractions` as-is; does not renormalize.
    explicit StackDistribution(std::vector<double> fractions);

    const std::vector<double>& fractions() const noexcept { return fractions_; }
    double operator[](std::size_t i) const { return fractions_[i]; }
    std::size_t player_count() const noexcept { return fractions_.size(); }

private:
    std::vector<double> fractions_;
};

/// fractions[i] = chips[i] / sum(chips).
StackDistribution normalize_stacks(std::span<const Chips> chips);

/// Prize per finishing place, place 1 first.
///
/// Non-increasing order is expected but not enforced: real payout tables
/// contain the odd data-entry quirk and none of the math depends on it.
/// Such ladders are accepted and flagged through `warnings()`.
class PayoutLadder {
public:
    PayoutLadder(std::vector<double> prizes, bool normalized);

    const std::vector<double>& prizes() const noexcept { return prizes_; }
    double operator[](std::size_t place_index) const { return prizes_[place_index]; }
    std::size_t size() const noexcept { return prizes_.size(); }
    bool normalized() const noexcept { return normalized_; }
    double total() const noexcept { return total_; }
    double max_prize() const noexcept;
    bool monotone() const noexcept { return monotone_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::vector<double> prizes_;
    bool normalized_;
    bool monotone_ = true;
    double total_ = 0.0;
    std::vector<std::string> warnings_;
};

/// Keeps the first `n_players` prizes, zero-pads unpaid places, and rescales
/// so the kept prizes sum to one.
PayoutLadder normalize_payouts(std::span<const double> prizes, std::size_t n_players);

/// probabilities(i, j): chance that player i finishes in place j (0-based).
/// Rows and columns each sum to one.
class FinishMatrix {
public:
    FinishMatrix(std::size_t n, std::vector<double> row_major);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t player, std::size_t place) const {
        return data_[player * n_ + place];
    }
    std::span<const double> row(std::size_t player) const {
        return {data_.data() + player * n_, n_};
    }
    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

/// Expected prize share per player. Standard errors are present only for
/// Monte Carlo estimates.
class EquityVector {
public:
    /// Validates against the ladder the equities were computed from: every
    /// equity lies in [0, max prize] and the total matches the ladder total
    /// (within 1e-9, or 4 * sum(SE) for sampled estimates).
    EquityVector(std::vector<double> equities, std::optional<std::vector<double>> standard_errors,
                 const PayoutLadder& ladder);

    const std::vector<double>& equities() const noexcept { return equities_; }
    const std::optional<std::vector<double>>& standard_errors() const noexcept {
        return standard_errors_;
    }
    double operator[](std::size_t i) const { return equities_[i]; }
    std::size_t size() const noexcept { return equities_.size(); }

private:
    std::vector<double> equities_;
    std::optional<std::vector<double>> standard_errors_;
};

struct SnapshotPlayer {
    std::string player_key;
    Chips chips = 0;
};

/// One end-of-day chip-count snapshot joined with the players' realized,
/// normalized prizes.
///
/// `places` (1-based finishing place per player) is optional; when given it
/// must be a permutation of 1..n and lets ladder() restore the exact prize
/// order. Without it the ladder is the targets sorted in decreasing order.
class SnapshotRecord {
public:
    SnapshotRecord(std::string event_id, std::string day_label, std::vector<SnapshotPlayer> players,
                   std::vector<double> targets, std::vector<int> places = {});

    const std::string& event_id() const noexcept { return event_id_; }
    const std::string& day_label() const noexcept { return day_label_; }
    const std::vector<SnapshotPlayer>& players() const noexcept { return players_; }
    const std::vector<double>& targets() const noexcept { return targets_; }
    const std::vector<int>& places() const noexcept { return places_; }
    std::size_t player_count() const noexcept { return players_.size(); }
    std::vector<Chips> chips() const;
    /// The normalized payout ladder the targets were drawn from.
    PayoutLadder ladder() const;

private:
    std::string event_id_;
    std::string day_label_;
    std::vector<SnapshotPlayer> players_;
    std::vector<double> targets_;
    std::vector<int> places_;
};

}  // namespace icm
