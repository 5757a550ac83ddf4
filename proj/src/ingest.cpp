#include "icm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace icm::ingest {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Key normalization

namespace {

// Lower-case ASCII replacement for Latin-1 Supplement and Latin Extended-A
// letters, or nullptr to keep the code point as-is.
const char* fold_latin(char32_t cp) {
    if (cp >= 0xC0 && cp <= 0xFF) {
        static const char* const table[64] = {
            "a",  "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i",  "i",
            "d",  "n", "o", "o", "o", "o", "o",  nullptr, "o", "u", "u", "u", "u", "y", "th", "ss",
            "a",  "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i",  "i",
            "d",  "n", "o", "o", "o", "o", "o",  nullptr, "o", "u", "u", "u", "u", "y", "th", "y"};
        return table[cp - 0xC0];
    }
    struct Range {
        char32_t lo, hi;
        const char* ascii;
    };
    static constexpr Range ranges[] = {
        {0x100, 0x105, "a"}, {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"}, {0x112, 0x11B, "e"},
        {0x11C, 0x123, "g"}, {0x124, 0x127, "h"}, {0x128, 0x131, "i"}, {0x132, 0x133, "ij"},
        {0x134, 0x135, "j"}, {0x136, 0x138, "k"}, {0x139, 0x142, "l"}, {0x143, 0x14B, "n"},
        {0x14C, 0x151, "o"}, {0x152, 0x153, "oe"}, {0x154, 0x159, "r"}, {0x15A, 0x161, "s"},
        {0x162, 0x167, "t"}, {0x168, 0x173, "u"}, {0x174, 0x175, "w"}, {0x176, 0x178, "y"},
        {0x179, 0x17E, "z"}, {0x17F, 0x17F, "s"},
    };
    for (const auto& r : ranges) {
        if (cp >= r.lo && cp <= r.hi) return r.ascii;
    }
    return nullptr;
}

// Decodes one UTF-8 sequence at text[pos]; invalid bytes decode as
// themselves (Latin-1 fallback) so mangled input still normalizes stably.
char32_t decode_utf8(std::string_view text, std::size_t& pos, std::size_t& length) {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    auto cont = [&](std::size_t k) {
        return pos + k < text.size() && (static_cast<unsigned char>(text[pos + k]) & 0xC0) == 0x80;
    };
    auto byte = [&](std::size_t k) { return static_cast<char32_t>(text[pos + k] & 0x3F); };
    if (b0 < 0x80) {
        length = 1;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        length = 2;
        return (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        length = 3;
        return (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        length = 4;
        return (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
    }
    length = 1;
    return b0;
}

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0xA0 || cp == 0x2007 || cp == 0x202F || cp == 0x3000;
}

}  // namespace

std::string normalize_key(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t length = 1;
        const char32_t cp = decode_utf8(text, pos, length);
        const std::string_view raw = text.substr(pos, length);
        pos += length;
        if (is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (cp >= 0x300 && cp <= 0x36F) continue;  // combining marks
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp >= 'A' && cp <= 'Z' ? cp - 'A' + 'a' : cp));
        } else if (const char* ascii = fold_latin(cp)) {
            out += ascii;
        } else {
            out.append(raw);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void schema_error(const std::string& reason, const std::string& detail) {
    throw std::invalid_argument(reason + ": " + detail);
}

const json& require(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end()) schema_error("missing_field", field);
    return *it;
}

std::string require_string(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_string()) schema_error("bad_type", std::string(field) + " must be a string");
    return v.get<std::string>();
}

const json& require_array(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_array()) schema_error("bad_type", std::string(field) + " must be an array");
    return v;
}

int require_place(const json& obj) {
    const json& v = require(obj, "place");
    if (!v.is_number_integer()) schema_error("bad_type", "place must be an integer");
    const auto place = v.get<std::int64_t>();
    if (place < 1 || place > 1'000'000) schema_error("invalid_place", std::to_string(place));
    return static_cast<int>(place);
}

std::string require_player_key(const json& obj) {
    std::string key = require_string(obj, "player_key");
    if (normalize_key(key).empty()) schema_error("empty_player_key", "player_key is blank");
    return key;
}

}  // namespace

RawEvent parse_event(std::string_view line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error& e) {
        schema_error("malformed_json", e.what());
    }
    if (!doc.is_object()) schema_error("bad_type", "record must be a JSON object");

    RawEvent ev;
    ev.event_id = require_string(doc, "event_id");
    if (ev.event_id.empty()) schema_error("missing_field", "event_id is empty");

    if (auto it = doc.find("sources"); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) schema_error("bad_type", "sources must be an array");
        for (const auto& s : *it) {
            if (!s.is_string()) schema_error("bad_type", "sources entries must be strings");
            ev.sources.insert(s.get<std::string>());
        }
    }
    if (auto it = doc.find("name"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) schema_error("bad_type", "name must be a string");
        ev.name = it->get<std::string>();
    }
    if (auto it = doc.find("year"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer()) schema_error("bad_type", "year must be an integer");
        ev.year = it->get<int>();
    }

    std::set<int> payout_places;
    for (const auto& p : require_array(doc, "payouts")) {
        if (!p.is_object()) schema_error("bad_type", "payout entries must be objects");
        PayoutEntry entry;
        entry.place = require_place(p);
        const json& prize = require(p, "prize");
        if (!prize.is_number()) schema_error("bad_type", "prize must be a number");
        entry.prize = prize.get<double>();
        if (!(entry.prize >= 0.0) || !std::isfinite(entry.prize))
            schema_error("negative_prize", "place " + std::to_string(entry.place));
        if (!payout_places.insert(entry.place).second)
            schema_error("duplicate_payout_place", "place " + std::to_string(entry.place));
        ev.payouts.push_back(entry);
    }

    std::unordered_set<std::string> result_keys;
    for (const auto& r : require_array(doc, "results")) {
        if (!r.is_object()) schema_error("bad_type", "result entries must be objects");
        ResultEntry entry;
        entry.place = require_place(r);
        entry.player_key = require_player_key(r);
        if (!result_keys.insert(normalize_key(entry.player_key)).second)
            schema_error("duplicate_result_player", entry.player_key);
        ev.results.push_back(std::move(entry));
    }

    for (const auto& d : require_array(doc, "days")) {
        if (!d.is_object()) schema_error("bad_type", "day entries must be objects");
        DayStacks day;
        day.day_label = require_string(d, "day_label");
        std::unordered_set<std::string> stack_keys;
        for (const auto& s : require_array(d, "stacks")) {
            if (!s.is_object()) schema_error("bad_type", "stack entries must be objects");
            StackEntry entry;
            entry.player_key = require_player_key(s);
            const json& chips = require(s, "chips");
            if (!chips.is_number_integer()) schema_error("bad_type", "chips must be an integer");
            entry.chips = chips.get<Chips>();
            if (entry.chips <= 0) schema_error("nonpositive_chips", entry.player_key);
            if (!stack_keys.insert(normalize_key(entry.player_key)).second)
                schema_error("duplicate_stack_player", day.day_label + ": " + entry.player_key);
            day.stacks.push_back(std::move(entry));
        }
        if (day.stacks.empty()) schema_error("empty_day", day.day_label);
        ev.days.push_back(std::move(day));
    }
    return ev;
}

std::string serialize_event(const RawEvent& event) {
    json doc;
    doc["event_id"] = event.event_id;
    doc["sources"] = event.sources;
    doc["name"] = event.name;
    doc["year"] = event.year ? json(*event.year) : json(nullptr);
    doc["payouts"] = json::array();
    for (const auto& p : event.payouts) doc["payouts"].push_back({{"place", p.place}, {"prize", p.prize}});
    doc["results"] = json::array();
    for (const auto& r : event.results)
        doc["results"].push_back({{"place", r.place}, {"player_key", r.player_key}});
    doc["days"] = json::array();
    for (const auto& d : event.days) {
        json stacks = json::array();
        for (const auto& s : d.stacks) stacks.push_back({{"player_key", s.player_key}, {"chips", s.chips}});
        doc["days"].push_back({{"day_label", d.day_label}, {"stacks", std::move(stacks)}});
    }
    return doc.dump();
}

LoadResult load_events(std::istream& in, const std::string& source_name) {
    LoadResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            out.events.push_back(parse_event(line));
        } catch (const std::invalid_argument& e) {
            Reject rej;
            rej.file = source_name;
            rej.line = line_no;
            const std::string what = e.what();
            const auto colon = what.find(": ");
            rej.reason = what.substr(0, colon);
            rej.detail = colon == std::string::npos ? std::string{} : what.substr(colon + 2);
            // Best effort: report the id even when the rest of the record is bad.
            try {
                auto doc = json::parse(line);
                if (doc.is_object() && doc.contains("event_id") && doc["event_id"].is_string())
                    rej.event_id = doc["event_id"].get<std::string>();
            } catch (const json::exception&) {
            }
            out.rejects.push_back(std::move(rej));
        }
    }
    return out;
}

LoadResult load_events(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<fs::path> files;
    if (fs::is_directory(path, ec)) {
        for (const auto& entry : fs::directory_iterator(path, ec)) {
            const auto ext = entry.path().extension().string();
            if (entry.is_regular_file() && (ext == ".jsonl" || ext == ".ndjson")) files.push_back(entry.path());
        }
        if (ec) throw IoError("cannot list " + path.string() + ": " + ec.message());
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(path, ec)) {
        files.push_back(path);
    } else {
        throw IoError("no such file or directory: " + path.string());
    }

    LoadResult all;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot open " + file.string());
        auto part = load_events(in, file.filename().string());
        std::move(part.events.begin(), part.events.end(), std::back_inserter(all.events));
        std::move(part.rejects.begin(), part.rejects.end(), std::back_inserter(all.rejects));
    }
    return all;
}

// ---------------------------------------------------------------------------
// Deduplication

namespace {

std::string match_key(const RawEvent& ev) {
    const std::string name = normalize_key(ev.name);
    if (name.empty()) return "id:" + ev.event_id;
    return name + "|" + (ev.year ? std::to_string(*ev.year) : std::string("?"));
}

using ResultSet = std::set<std::pair<int, std::string>>;

ResultSet result_set(const std::vector<ResultEntry>& results) {
    ResultSet out;
    for (const auto& r : results) out.emplace(r.place, normalize_key(r.player_key));
    return out;
}

// Single-event normalization shared with the merge path so that a second
// pass is a no-op.
std::vector<DayStacks> merge_days(const std::vector<const RawEvent*>& group) {
    std::vector<DayStacks> days;
    std::map<std::string, std::size_t> index;
    for (const RawEvent* ev : group) {
        for (const auto& day : ev->days) {
            const std::string label = normalize_key(day.day_label);
            auto [it, inserted] = index.emplace(label, days.size());
            if (inserted) {
                days.push_back(day);
            } else if (day.stacks.size() > days[it->second].stacks.size()) {
                days[it->second] = day;
            }
        }
    }
    return days;
}

}  // namespace

DedupeResult dedupe_events(const std::vector<RawEvent>& events) {
    std::map<std::string, std::vector<const RawEvent*>> groups;
    for (const auto& ev : events) groups[match_key(ev)].push_back(&ev);

    DedupeResult out;
    for (auto& [key, group] : groups) {
        std::stable_sort(group.begin(), group.end(),
                         [](const RawEvent* a, const RawEvent* b) { return a->event_id < b->event_id; });

        const RawEvent* fullest_results = nullptr;
        ResultSet fullest_set;
        bool conflict = false;
        for (const RawEvent* ev : group) {
            if (ev->results.empty()) continue;
            ResultSet set = result_set(ev->results);
            if (!fullest_results) {
                fullest_results = ev;
                fullest_set = std::move(set);
                continue;
            }
            const ResultSet& small = set.size() <= fullest_set.size() ? set : fullest_set;
            const ResultSet& large = set.size() <= fullest_set.size() ? fullest_set : set;
            if (!std::includes(large.begin(), large.end(), small.begin(), small.end())) {
                conflict = true;
                break;
            }
            if (set.size() > fullest_set.size()) {
                fullest_results = ev;
                fullest_set = std::move(set);
            }
        }
        if (conflict) {
            DedupeConflict c{key, {}};
            for (const RawEvent* ev : group) c.event_ids.push_back(ev->event_id);
            out.conflicts.push_back(std::move(c));
            continue;
        }

        RawEvent merged;
        merged.event_id = group.front()->event_id;
        merged.year = group.front()->year;
        const RawEvent* fullest_payouts = group.front();
        for (const RawEvent* ev : group) {
            merged.sources.insert(ev->sources.begin(), ev->sources.end());
            if (merged.name.empty()) merged.name = ev->name;
            if (ev->payouts.size() > fullest_payouts->payouts.size()) fullest_payouts = ev;
        }
        merged.payouts = fullest_payouts->payouts;
        if (fullest_results) merged.results = fullest_results->results;
        merged.days = merge_days(group);
        out.merged += group.size() - 1;
        out.events.push_back(std::move(merged));
    }
    std::sort(out.events.begin(), out.events.end(),
              [](const RawEvent& a, const RawEvent& b) { return a.event_id < b.event_id; });
    return out;
}

// ---------------------------------------------------------------------------
// Snapshot construction

SnapshotBuild build_snapshots(const std::vector<RawEvent>& events) {
    SnapshotBuild out;
    IngestReport& rep = out.report;
    for (const auto& ev : events) {
        std::unordered_map<std::string, int> place_of;
        for (const auto& r : ev.results) place_of.emplace(normalize_key(r.player_key), r.place);
        std::vector<double> prizes;
        for (const auto& p : ev.payouts) {
            if (static_cast<std::size_t>(p.place) > prizes.size()) prizes.resize(p.place, 0.0);
            prizes[p.place - 1] = p.prize;
        }

        for (const auto& day : ev.days) {
            ++rep.snapshots_total;
            const std::size_t n = day.stacks.size();
            if (n < 2) {
                ++rep.snapshots_dropped_1player;
                continue;
            }
            if (prizes.empty()) {
                ++rep.snapshots_dropped_no_payouts;
                continue;
            }
            if (ev.results.empty()) {
                ++rep.snapshots_dropped_no_results;
                continue;
            }
            std::vector<int> places;
            places.reserve(n);
            for (const auto& s : day.stacks) {
                auto it = place_of.find(normalize_key(s.player_key));
                if (it == place_of.end()) break;
                places.push_back(it->second);
            }
            if (places.size() != n) {
                ++rep.snapshots_dropped_unmatched;
                continue;
            }
            std::vector<int> sorted = places;
            std::sort(sorted.begin(), sorted.end());
            bool consistent = true;
            for (std::size_t k = 0; k < n; ++k) consistent = consistent && sorted[k] == static_cast<int>(k + 1);
            if (!consistent) {
                ++rep.snapshots_dropped_inconsistent_places;
                continue;
            }
            double relevant = 0.0;
            for (std::size_t k = 0; k < std::min(n, prizes.size()); ++k) relevant += prizes[k];
            if (!(relevant > 0.0)) {
                ++rep.snapshots_dropped_zero_prizes;
                continue;
            }
            const PayoutLadder ladder = normalize_payouts(prizes, n);
            std::vector<SnapshotPlayer> players;
            std::vector<double> targets;
            for (std::size_t k = 0; k < n; ++k) {
                players.push_back({day.stacks[k].player_key, day.stacks[k].chips});
                targets.push_back(ladder[static_cast<std::size_t>(places[k] - 1)]);
            }
            out.snapshots.emplace_back(ev.event_id, day.day_label, std::move(players), std::move(targets),
                                       std::move(places));
            ++rep.snapshots_kept;
            rep.players_total += n;
        }
    }
    std::stable_sort(out.snapshots.begin(), out.snapshots.end(), [](const auto& a, const auto& b) {
        return std::tie(a.event_id(), a.day_label()) < std::tie(b.event_id(), b.day_label());
    });
    return out;
}

IngestOutcome ingest_path(const std::filesystem::path& path) {
    LoadResult loaded = load_events(path);
    DedupeResult deduped = dedupe_events(loaded.events);
    SnapshotBuild built = build_snapshots(deduped.events);

    IngestOutcome out;
    out.report = built.report;
    out.report.events_in = loaded.events.size();
    out.report.events_deduped = deduped.events.size();
    out.report.events_merged = deduped.merged;
    out.report.events_conflicted = 0;
    for (const auto& c : deduped.conflicts) out.report.events_conflicted += c.event_ids.size();
    out.report.records_rejected = loaded.rejects.size();
    out.snapshots = std::move(built.snapshots);
    out.rejects = std::move(loaded.rejects);
    out.conflicts = std::move(deduped.conflicts);
    return out;
}

// ---------------------------------------------------------------------------
// CSV and JSON output

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

// Splits one CSV record, which may span physical lines inside quotes.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void write_snapshots_csv(std::ostream& out, const std::vector<SnapshotRecord>& snapshots) {
    out << "event_id,day_label,player_key,chips,target\n";
    for (const auto& snap : snapshots) {
        for (std::size_t k = 0; k < snap.player_count(); ++k) {
            out << csv_field(snap.event_id()) << ',' << csv_field(snap.day_label()) << ','
                << csv_field(snap.players()[k].player_key) << ',' << snap.players()[k].chips << ','
                << format_double(snap.targets()[k]) << '\n';
        }
    }
}

std::vector<SnapshotRecord> read_snapshots_csv(std::istream& in) {
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields) || fields.size() != 5 || fields[0] != "event_id")
        throw std::invalid_argument("snapshot csv: missing header event_id,day_label,player_key,chips,target");

    std::vector<SnapshotRecord> out;
    std::string cur_event, cur_day;
    std::vector<SnapshotPlayer> players;
    std::vector<double> targets;
    auto flush = [&] {
        if (!players.empty()) out.emplace_back(cur_event, cur_day, std::move(players), std::move(targets));
        players.clear();
        targets.clear();
    };
    std::size_t row = 1;
    while (read_csv_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 5) throw std::invalid_argument("snapshot csv: row " + std::to_string(row) + " needs 5 fields");
        if (fields[0] != cur_event || fields[1] != cur_day) {
            flush();
            cur_event = fields[0];
            cur_day = fields[1];
        }
        Chips chips = 0;
        const auto& cs = fields[3];
        auto [p, ec] = std::from_chars(cs.data(), cs.data() + cs.size(), chips);
        if (ec != std::errc{} || p != cs.data() + cs.size())
            throw std::invalid_argument("snapshot csv: row " + std::to_string(row) + " has bad chips");
        double target = 0.0;
        try {
            std::size_t used = 0;
            target = std::stod(fields[4], &used);
            if (used != fields[4].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::invalid_argument("snapshot csv: row " + std::to_string(row) + " has bad target");
        }
        players.push_back({fields[2], chips});
        targets.push_back(target);
    }
    flush();
    return out;
}

std::string report_to_json(const IngestReport& r) {
    json doc = {
        {"events_in", r.events_in},
        {"events_deduped", r.events_deduped},
        {"events_merged", r.events_merged},
        {"events_conflicted", r.events_conflicted},
        {"records_rejected", r.records_rejected},
        {"snapshots_total", r.snapshots_total},
        {"snapshots_kept", r.snapshots_kept},
        {"snapshots_dropped_1player", r.snapshots_dropped_1player},
        {"snapshots_dropped_unmatched", r.snapshots_dropped_unmatched},
        {"snapshots_dropped_no_payouts", r.snapshots_dropped_no_payouts},
        {"snapshots_dropped_no_results", r.snapshots_dropped_no_results},
        {"snapshots_dropped_inconsistent_places", r.snapshots_dropped_inconsistent_places},
        {"snapshots_dropped_zero_prizes", r.snapshots_dropped_zero_prizes},
        {"players_total", r.players_total},
    };
    return doc.dump(2);
}

std::string rejects_to_json(const std::vector<Reject>& rejects, const std::vector<DedupeConflict>& conflicts) {
    json doc = {{"rejects", json::array()}, {"dedupe_conflicts", json::array()}};
    for (const auto& r : rejects) {
        doc["rejects"].push_back({{"file", r.file},
                                  {"line", r.line},
                                  {"event_id", r.event_id},
                                  {"reason", r.reason},
                                  {"detail", r.detail}});
    }
    for (const auto& c : conflicts) {
        doc["dedupe_conflicts"].push_back(
            {{"match_key", c.match_key}, {"event_ids", c.event_ids}, {"reason", "conflicting_results"}});
    }
    return doc.dump(2);
}

}  // namespace icm::ingest
