#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icm/exact.hpp"
#include "icm/model.hpp"
#include "icm/monte_carlo.hpp"
#include "icm/stats.hpp"

namespace icm {

/// Appended to every report: the t-tests treat players as independent
/// samples, but equities and prizes within one snapshot each sum to one.
inline constexpr std::string_view kIndependenceCaveat =
    "t-tests treat every player as an independent sample. Within a snapshot the "
    "estimates and the realized prizes each sum to one, so samples from the same "
    "event are dependent and the reported p-values and confidence intervals are "
    "optimistic. Cluster-robust or bootstrap inference is not performed.";

struct RunOptions {
    ExactConfig exact;
    McConfig mc;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

// ---------------------------------------------------------------------------
// Experiment 1: ICM vs. rank-order baseline

struct PairedErrorReport {
    double mse_baseline = 0.0;
    double se_mse_baseline = 0.0;
    double mse_icm = 0.0;
    double se_mse_icm = 0.0;
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value_one_sided = 1.0;
    double log10_p_value = 0.0;
    std::size_t n_players = 0;
    std::size_t n_snapshots = 0;
    std::size_t n_sampled_snapshots = 0;  // valued by Monte Carlo
};

/// Per-player squared errors of both estimators, in canonical snapshot
/// order (event_id, day_label, then input position).
struct SquaredErrors {
    std::vector<double> baseline;
    std::vector<double> icm;
    std::size_t sampled_snapshots = 0;
};

SquaredErrors squared_errors(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts);

/// MSE of both estimators against realized prizes, with a one-sided paired
/// t-test of baseline error > ICM error. Exact ICM up to
/// opts.exact.max_players_exact players, Monte Carlo beyond; each sampled
/// snapshot is seeded from opts.mc.seed and its (event_id, day_label).
/// Throws stats::ZeroVarianceError when the two estimators never differ.
PairedErrorReport experiment1(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// Experiment 2: residuals stratified by stack size

enum class Stratum { large, medium, small };

std::string_view to_string(Stratum s);

/// k = max(1, floor(n/4)) biggest stacks are large, k smallest are small,
/// the rest medium. Ties keep input order (stable descending sort).
std::vector<Stratum> stratify_quartiles(const SnapshotRecord& snapshot);

struct StratumReport {
    Stratum stratum = Stratum::large;
    std::size_t n_players = 0;
    double mean_residual = 0.0;
    double se_residual = 0.0;
    // Absent when the stratum has fewer than two members or zero variance.
    std::optional<double> t_statistic;
    std::optional<std::size_t> degrees_of_freedom;
    std::optional<double> p_value_two_sided;
    std::optional<double> log10_p_value;
    std::string note;
};

struct Experiment2Report {
    std::size_t max_players = 10;
    std::size_t n_snapshots = 0;
    std::size_t n_players = 0;
    std::array<StratumReport, 3> strata;
};

inline constexpr std::size_t kStratifyMaxPlayers = 10;

/// Residual = realized prize - exact ICM equity, over snapshots with at most
/// `max_players` players. Throws std::invalid_argument if none survive.
Experiment2Report experiment2(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts = {},
                              std::size_t max_players = kStratifyMaxPlayers);

/// Residuals and labels per player, in canonical snapshot order.
struct StratifiedResiduals {
    std::vector<double> residuals;
    std::vector<Stratum> strata;
    std::size_t n_snapshots = 0;
};

StratifiedResiduals stratified_residuals(const std::vector<SnapshotRecord>& snapshots,
                                         const RunOptions& opts, std::size_t max_players);

/// Indices of `snapshots` sorted by (event_id, day_label, content).
std::vector<std::size_t> canonical_order(const std::vector<SnapshotRecord>& snapshots);

}  // namespace icm
