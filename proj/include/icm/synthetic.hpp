#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "icm/ingest.hpp"
#include "icm/model.hpp"

namespace icm::synthetic {

/// Tournaments whose finishing orders are drawn from the ICM's own
/// sequential model, so the ICM is the true equity by construction.
struct SyntheticConfig {
    std::size_t events = 500;
    std::size_t min_players = 2;
    std::size_t max_players = 10;
    double stack_sigma = 0.8;        // log-normal spread of chip counts
    double min_payout_ratio = 0.55;  // geometric ladder decay, drawn per event
    double max_payout_ratio = 0.85;
    bool final_day = true;           // append the 1-player closing snapshot
    std::uint64_t seed = 20250601;
};

/// Canonical-schema events, one "Final Table" snapshot each (plus the
/// trivial closing day when cfg.final_day).
std::vector<ingest::RawEvent> generate_events(const SyntheticConfig& cfg);

/// generate_events passed through build_snapshots.
std::vector<SnapshotRecord> generate_snapshots(const SyntheticConfig& cfg);

}  // namespace icm::synthetic
