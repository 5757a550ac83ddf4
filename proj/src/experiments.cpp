#include "icm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "icm/baseline.hpp"
#include "icm/valuation.hpp"

namespace icm {

namespace {

// Runs body(k) for k in [0, count) on up to `threads` workers. Each index is
// handled exactly once; the first exception is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    workers.clear();
    if (error) std::rethrow_exception(error);
}

std::uint64_t hash_string(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t snapshot_seed(std::uint64_t seed, const SnapshotRecord& snap) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    h = hash_string(h, snap.event_id());
    h = hash_string(h ^ 0xFF, snap.day_label());
    return mix64(seed ^ mix64(h));
}

template <typename T>
std::vector<T> concat(std::vector<std::vector<T>>& parts) {
    std::vector<T> out;
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<std::size_t> canonical_order(const std::vector<SnapshotRecord>& snapshots) {
    std::vector<std::size_t> idx(snapshots.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = snapshots[a];
        const auto& y = snapshots[b];
        if (x.event_id() != y.event_id()) return x.event_id() < y.event_id();
        if (x.day_label() != y.day_label()) return x.day_label() < y.day_label();
        const auto cx = x.chips(), cy = y.chips();
        if (cx != cy) return cx < cy;
        return x.targets() < y.targets();
    });
    return idx;
}

SquaredErrors squared_errors(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts) {
    const auto order = canonical_order(snapshots);
    std::vector<std::vector<double>> base(order.size()), icm(order.size());
    std::vector<char> sampled(order.size(), 0);

    parallel_for(order.size(), opts.threads, [&](std::size_t k) {
        const SnapshotRecord& snap = snapshots[order[k]];
        const auto chips = snap.chips();
        const auto stacks = normalize_stacks(chips);
        const auto& targets = snap.targets();
        const PayoutLadder ladder = snap.ladder();

        McConfig mc = opts.mc;
        mc.seed = snapshot_seed(opts.mc.seed, snap);
        const Valuation icm_value = value_stacks(stacks, ladder, opts.exact, mc);
        const EquityVector base_value = baseline_equity(chips, ladder);
        sampled[k] = icm_value.sampled;

        for (std::size_t i = 0; i < snap.player_count(); ++i) {
            const double eb = base_value[i] - targets[i];
            const double ei = icm_value.equity[i] - targets[i];
            base[k].push_back(eb * eb);
            icm[k].push_back(ei * ei);
        }
    });

    SquaredErrors out;
    out.baseline = concat(base);
    out.icm = concat(icm);
    out.sampled_snapshots = static_cast<std::size_t>(std::count(sampled.begin(), sampled.end(), 1));
    return out;
}

PairedErrorReport experiment1(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts) {
    if (snapshots.empty()) throw std::invalid_argument("experiment1: no snapshots");
    const SquaredErrors errs = squared_errors(snapshots, opts);

    PairedErrorReport r;
    r.n_snapshots = snapshots.size();
    r.n_sampled_snapshots = errs.sampled_snapshots;
    r.n_players = errs.icm.size();
    const double root_n = std::sqrt(static_cast<double>(r.n_players));
    r.mse_baseline = stats::mean(errs.baseline);
    r.se_mse_baseline = stats::sample_sd(errs.baseline) / root_n;
    r.mse_icm = stats::mean(errs.icm);
    r.se_mse_icm = stats::sample_sd(errs.icm) / root_n;

    const auto test = stats::paired_t_one_sided(errs.baseline, errs.icm);
    r.t_statistic = test.t;
    r.degrees_of_freedom = test.df;
    r.p_value_one_sided = test.p;
    r.log10_p_value = test.log10_p;
    return r;
}

std::string_view to_string(Stratum s) {
    switch (s) {
        case Stratum::large: return "large";
        case Stratum::medium: return "medium";
        case Stratum::small: return "small";
    }
    return "?";
}

std::vector<Stratum> stratify_quartiles(const SnapshotRecord& snapshot) {
    const std::size_t n = snapshot.player_count();
    const std::size_t k = std::max<std::size_t>(1, n / 4);
    std::vector<std::size_t> by_chips(n);
    std::iota(by_chips.begin(), by_chips.end(), std::size_t{0});
    const auto& players = snapshot.players();
    std::stable_sort(by_chips.begin(), by_chips.end(),
                     [&](std::size_t a, std::size_t b) { return players[a].chips > players[b].chips; });
    std::vector<Stratum> labels(n, Stratum::medium);
    for (std::size_t r = 0; r < n; ++r) {
        if (r < k) labels[by_chips[r]] = Stratum::large;
        else if (r >= n - k) labels[by_chips[r]] = Stratum::small;
    }
    return labels;
}

StratifiedResiduals stratified_residuals(const std::vector<SnapshotRecord>& snapshots,
                                         const RunOptions& opts, std::size_t max_players) {
    std::vector<std::size_t> order;
    for (std::size_t idx : canonical_order(snapshots)) {
        if (snapshots[idx].player_count() <= max_players) order.push_back(idx);
    }
    ExactConfig exact = opts.exact;
    exact.max_players_exact = std::max(exact.max_players_exact, max_players);

    std::vector<std::vector<double>> residuals(order.size());
    std::vector<std::vector<Stratum>> labels(order.size());
    parallel_for(order.size(), opts.threads, [&](std::size_t k) {
        const SnapshotRecord& snap = snapshots[order[k]];
        const auto equity = icm_equity(normalize_stacks(snap.chips()), snap.ladder(), exact);
        for (std::size_t i = 0; i < snap.player_count(); ++i) residuals[k].push_back(snap.targets()[i] - equity[i]);
        labels[k] = stratify_quartiles(snap);
    });

    StratifiedResiduals out;
    out.residuals = concat(residuals);
    out.strata = concat(labels);
    out.n_snapshots = order.size();
    return out;
}

Experiment2Report experiment2(const std::vector<SnapshotRecord>& snapshots, const RunOptions& opts,
                              std::size_t max_players) {
    const StratifiedResiduals res = stratified_residuals(snapshots, opts, max_players);
    if (res.n_snapshots == 0)
        throw std::invalid_argument("experiment2: no snapshots with at most " + std::to_string(max_players) +
                                    " players");
    Experiment2Report report;
    report.max_players = max_players;
    report.n_snapshots = res.n_snapshots;
    report.n_players = res.residuals.size();

    const Stratum all[] = {Stratum::large, Stratum::medium, Stratum::small};
    for (std::size_t s = 0; s < 3; ++s) {
        StratumReport& sr = report.strata[s];
        sr.stratum = all[s];
        std::vector<double> values;
        for (std::size_t i = 0; i < res.residuals.size(); ++i) {
            if (res.strata[i] == sr.stratum) values.push_back(res.residuals[i]);
        }
        sr.n_players = values.size();
        if (values.empty()) {
            sr.note = "empty stratum; test skipped";
            continue;
        }
        sr.mean_residual = stats::mean(values);
        if (values.size() < 2) {
            sr.note = "fewer than 2 players; test skipped";
            continue;
        }
        sr.se_residual = stats::sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
        try {
            const auto test = stats::one_sample_t_two_sided(values);
            sr.t_statistic = test.t;
            sr.degrees_of_freedom = test.df;
            sr.p_value_two_sided = test.p;
            sr.log10_p_value = test.log10_p;
        } catch (const stats::ZeroVarianceError&) {
            sr.note = "zero variance; test skipped";
        }
    }
    return report;
}

}  // namespace icm
