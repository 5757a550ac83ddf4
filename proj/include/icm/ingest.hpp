#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "icm/model.hpp"

namespace icm::ingest {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PayoutEntry {
    int place = 0;
    double prize = 0.0;
    bool operator==(const PayoutEntry&) const = default;
};

struct ResultEntry {
    int place = 0;
    std::string player_key;
    bool operator==(const ResultEntry&) const = default;
};

struct StackEntry {
    std::string player_key;
    Chips chips = 0;
    bool operator==(const StackEntry&) const = default;
};

struct DayStacks {
    std::string day_label;
    std::vector<StackEntry> stacks;
    bool operator==(const DayStacks&) const = default;
};

/// One tournament event in the canonical schema (one NDJSON line).
struct RawEvent {
    std::string event_id;
    std::set<std::string> sources;
    std::string name;
    std::optional<int> year;
    std::vector<PayoutEntry> payouts;
    std::vector<ResultEntry> results;
    std::vector<DayStacks> days;
    bool operator==(const RawEvent&) const = default;
};

struct Reject {
    std::string file;
    std::size_t line = 0;
    std::string event_id;  // empty when the line could not be parsed
    std::string reason;    // machine-readable code, e.g. "missing_field"
    std::string detail;
};

struct LoadResult {
    std::vector<RawEvent> events;
    std::vector<Reject> rejects;
};

/// Case-folded, whitespace-collapsed, diacritic-stripped form used to match
/// snapshot players against final results and event names across sources.
std::string normalize_key(std::string_view text);

/// Parses one canonical NDJSON line. Throws std::invalid_argument carrying
/// "<reason>: <detail>" on a schema violation.
RawEvent parse_event(std::string_view line);

std::string serialize_event(const RawEvent& event);

/// Reads a .jsonl/.ndjson file, or every such file in a directory (sorted by
/// name). Malformed lines become Reject entries. Throws IoError if the path
/// cannot be read.
LoadResult load_events(const std::filesystem::path& path);
LoadResult load_events(std::istream& in, const std::string& source_name);

struct DedupeConflict {
    std::string match_key;
    std::vector<std::string> event_ids;
};

struct DedupeResult {
    std::vector<RawEvent> events;
    std::vector<DedupeConflict> conflicts;
    std::size_t merged = 0;  // input events absorbed into another
};

/// Merges events sharing (normalized name, year). Sources are unioned;
/// payouts come from the most complete source; days are merged per label,
/// keeping the fuller stack list. Result lists must agree (one may extend
/// the other); otherwise the whole group is excluded and reported.
DedupeResult dedupe_events(const std::vector<RawEvent>& events);

struct IngestReport {
    std::size_t events_in = 0;
    std::size_t events_deduped = 0;  // events remaining after deduplication
    std::size_t events_merged = 0;
    std::size_t events_conflicted = 0;
    std::size_t records_rejected = 0;
    std::size_t snapshots_total = 0;
    std::size_t snapshots_kept = 0;
    std::size_t snapshots_dropped_1player = 0;
    std::size_t snapshots_dropped_unmatched = 0;
    std::size_t snapshots_dropped_no_payouts = 0;
    std::size_t snapshots_dropped_no_results = 0;
    std::size_t snapshots_dropped_inconsistent_places = 0;
    std::size_t snapshots_dropped_zero_prizes = 0;
    std::size_t players_total = 0;

    std::size_t snapshots_dropped() const noexcept {
        return snapshots_dropped_1player + snapshots_dropped_unmatched + snapshots_dropped_no_payouts +
               snapshots_dropped_no_results + snapshots_dropped_inconsistent_places +
               snapshots_dropped_zero_prizes;
    }
};

struct SnapshotBuild {
    std::vector<SnapshotRecord> snapshots;
    IngestReport report;
};

/// Joins each day's stacks with final results. A snapshot is kept only if
/// it has at least two players, every player matches a result, and their
/// finishing places are exactly 1..n. Targets are the prizes of those places
/// divided by the sum of the top-n prizes. Output sorted by
/// (event_id, day_label).
SnapshotBuild build_snapshots(const std::vector<RawEvent>& events);

struct IngestOutcome {
    std::vector<SnapshotRecord> snapshots;
    IngestReport report;
    std::vector<Reject> rejects;
    std::vector<DedupeConflict> conflicts;
};

/// load_events + dedupe_events + build_snapshots.
IngestOutcome ingest_path(const std::filesystem::path& path);

void write_snapshots_csv(std::ostream& out, const std::vector<SnapshotRecord>& snapshots);
/// Inverse of write_snapshots_csv; rows are grouped by (event_id, day_label).
std::vector<SnapshotRecord> read_snapshots_csv(std::istream& in);

std::string report_to_json(const IngestReport& report);
std::string rejects_to_json(const std::vector<Reject>& rejects,
                            const std::vector<DedupeConflict>& conflicts);

}  // namespace icm::ingest
