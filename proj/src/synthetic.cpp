#include "icm/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "icm/monte_carlo.hpp"

namespace icm::synthetic {

namespace {

// Box-Muller; written out so output does not depend on the standard
// library's distribution implementations.
double standard_normal(CounterRng& rng) {
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<ingest::RawEvent> generate_events(const SyntheticConfig& cfg) {
    if (cfg.min_players < 2 || cfg.min_players > cfg.max_players)
        throw std::invalid_argument("SyntheticConfig: require 2 <= min_players <= max_players");
    if (!(cfg.min_payout_ratio > 0.0) || cfg.min_payout_ratio > cfg.max_payout_ratio || cfg.max_payout_ratio > 1.0)
        throw std::invalid_argument("SyntheticConfig: payout ratios must satisfy 0 < min <= max <= 1");

    std::vector<ingest::RawEvent> events;
    events.reserve(cfg.events);
    for (std::size_t e = 0; e < cfg.events; ++e) {
        CounterRng rng(cfg.seed, e);
        const std::size_t span = cfg.max_players - cfg.min_players + 1;
        const std::size_t n = cfg.min_players + static_cast<std::size_t>(rng.uniform() * static_cast<double>(span));

        char id[32];
        std::snprintf(id, sizeof id, "synth-%06zu", e);
        ingest::RawEvent ev;
        ev.event_id = id;
        ev.name = std::string("Synthetic Event #") + std::to_string(e + 1);
        ev.year = 2024;
        ev.sources = {"synthetic"};

        const double ratio = cfg.min_payout_ratio + rng.uniform() * (cfg.max_payout_ratio - cfg.min_payout_ratio);
        double prize = 1'000'000.0;
        for (std::size_t place = 1; place <= n; ++place) {
            ev.payouts.push_back({static_cast<int>(place), std::round(prize)});
            prize *= ratio;
        }

        ingest::DayStacks day{"Final Table", {}};
        std::vector<Chips> chips;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<Chips>(std::llround(1'000'000.0 * std::exp(cfg.stack_sigma * standard_normal(rng)))) + 1;
            chips.push_back(c);
            day.stacks.push_back({"Player " + std::to_string(i + 1), c});
        }
        const auto order = sample_finish_order(normalize_stacks(chips), rng);
        for (std::size_t place = 0; place < n; ++place)
            ev.results.push_back({static_cast<int>(place + 1), day.stacks[order[place]].player_key});
        ev.days.push_back(std::move(day));
        if (cfg.final_day) {
            const auto& winner = ev.days.front().stacks[order.front()];
            ev.days.push_back({"Final Day End", {{winner.player_key, winner.chips * 2}}});
        }
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<SnapshotRecord> generate_snapshots(const SyntheticConfig& cfg) {
    return ingest::build_snapshots(generate_events(cfg)).snapshots;
}

}  // namespace icm::synthetic
