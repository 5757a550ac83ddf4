#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "icm/exact.hpp"
#include "icm/experiments.hpp"
#include "icm/ingest.hpp"
#include "icm/monte_carlo.hpp"
#include "icm/report.hpp"
#include "icm/synthetic.hpp"
#include "icm/valuation.hpp"
#include "json.hpp"

namespace icm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::uint64_t seed = McConfig{}.seed;
    double tolerance = McConfig{}.se_tolerance;
    std::size_t max_sims = McConfig{}.max_sims;
    std::size_t min_sims = McConfig{}.min_sims;
    std::size_t batch_size = McConfig{}.batch_size;
    std::size_t exact_cutoff = ExactConfig{}.max_players_exact;
    std::size_t threads = 0;
    std::string output_format = "table";

    McConfig mc() const { return {tolerance, max_sims, min_sims, batch_size, seed}; }
    ExactConfig exact() const { return {exact_cutoff, ExactEngine::automatic}; }
    RunOptions run_options() const { return {exact(), mc(), threads}; }
    bool json_output() const { return output_format == "json"; }
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--seed", f.seed, "Monte Carlo seed")->capture_default_str();
    sub->add_option("--tolerance", f.tolerance, "Monte Carlo standard-error tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--max-sims", f.max_sims, "Monte Carlo simulation cap")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--min-sims", f.min_sims, "Monte Carlo minimum simulations")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--batch-size", f.batch_size, "simulations between stopping checks")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--exact-cutoff", f.exact_cutoff, "largest field valued exactly")
        ->check(CLI::Range(std::size_t{1}, kSubsetDpMaxPlayers))
        ->capture_default_str();
    sub->add_option("--threads", f.threads, "worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--output-format", f.output_format, "table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
}

std::string data_default() {
    const char* env = std::getenv(kDataDirEnv);
    return env ? env : "";
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    os << text;
    if (!os) throw DataError("error writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<SnapshotRecord> load_snapshots(const std::string& data, std::ostream& err) {
    if (data.empty()) throw DataError(std::string("no data path given (use --data or set ") + kDataDirEnv + ")");
    const fs::path path(data);
    if (fs::is_regular_file(path) && path.extension() == ".csv") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open " + data);
        try {
            return ingest::read_snapshots_csv(in);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }
    try {
        auto outcome = ingest::ingest_path(path);
        if (!outcome.rejects.empty())
            err << "warning: " << outcome.rejects.size() << " malformed record(s) skipped\n";
        return std::move(outcome.snapshots);
    } catch (const ingest::IoError& e) {
        throw DataError(e.what());
    }
}

std::string fixed(double v, int digits = 8) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

EquityMethod parse_method(const std::string& m) {
    if (m == "exact") return EquityMethod::exact;
    if (m == "mc") return EquityMethod::monte_carlo;
    return EquityMethod::automatic;
}

int cmd_equity(const std::vector<Chips>& chips, const std::vector<double>& payouts, const std::string& method,
               const CommonFlags& f, std::ostream& out) {
    const auto stacks = normalize_stacks(chips);
    const auto ladder = normalize_payouts(payouts, chips.size());
    const Valuation v = value_stacks(stacks, ladder, f.exact(), f.mc(), parse_method(method));
    const auto& se = v.equity.standard_errors();
    if (f.json_output()) {
        json doc = {{"method", v.sampled ? "mc" : "exact"},
                    {"equities", v.equity.equities()},
                    {"standard_errors", se ? json(*se) : json(nullptr)},
                    {"simulations", v.sampled ? json(v.simulations) : json(nullptr)},
                    {"warnings", ladder.warnings()}};
        out << doc.dump(2) << '\n';
        return kOk;
    }
    out << "player  chips  equity" << (se ? "  se" : "") << '\n';
    for (std::size_t i = 0; i < chips.size(); ++i) {
        out << (i + 1) << "  " << chips[i] << "  " << fixed(v.equity[i]);
        if (se) out << "  " << fixed((*se)[i]);
        out << '\n';
    }
    if (v.sampled) out << "simulations: " << v.simulations << '\n';
    for (const auto& w : ladder.warnings()) out << "warning: " << w << '\n';
    return kOk;
}

int cmd_probs(const std::vector<Chips>& chips, const std::string& method, const CommonFlags& f, std::ostream& out) {
    const auto stacks = normalize_stacks(chips);
    const std::size_t n = chips.size();
    std::optional<FinishMatrix> matrix;
    std::optional<std::size_t> sims;
    const bool sample = method == "mc" || (method == "auto" && n > f.exact_cutoff);
    if (sample) {
        auto mc = finish_frequencies_mc(stacks, f.mc());
        sims = mc.simulations;
        matrix.emplace(std::move(mc.frequencies));
    } else if (method == "naive") {
        matrix.emplace(finish_probabilities_naive(stacks));
    } else {
        ExactConfig cfg = f.exact();
        if (method == "exact") cfg.max_players_exact = std::max(cfg.max_players_exact, std::min(n, kSubsetDpMaxPlayers));
        matrix.emplace(finish_probabilities(stacks, cfg));
    }
    if (f.json_output()) {
        json rows = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            auto r = matrix->row(i);
            rows.push_back(std::vector<double>(r.begin(), r.end()));
        }
        out << json{{"method", sample ? "mc" : method == "naive" ? "naive" : "exact"},
                    {"matrix", std::move(rows)},
                    {"simulations", sims ? json(*sims) : json(nullptr)}}
                   .dump(2)
            << '\n';
        return kOk;
    }
    out << "player";
    for (std::size_t j = 0; j < n; ++j) out << "  place" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << (i + 1);
        for (std::size_t j = 0; j < n; ++j) out << "  " << fixed((*matrix)(i, j));
        out << '\n';
    }
    if (sims) out << "simulations: " << *sims << '\n';
    return kOk;
}

int cmd_ingest(const std::string& in, const std::string& out_dir, const CommonFlags& f, std::ostream& out) {
    if (in.empty()) throw DataError(std::string("no input path given (use --in or set ") + kDataDirEnv + ")");
    ingest::IngestOutcome outcome;
    try {
        outcome = ingest::ingest_path(in);
    } catch (const ingest::IoError& e) {
        throw DataError(e.what());
    }
    ensure_dir(out_dir);
    std::ostringstream csv;
    ingest::write_snapshots_csv(csv, outcome.snapshots);
    write_file(fs::path(out_dir) / "snapshots.csv", csv.str());
    const std::string report = ingest::report_to_json(outcome.report);
    write_file(fs::path(out_dir) / "ingest_report.json", report + "\n");
    write_file(fs::path(out_dir) / "rejects.json", ingest::rejects_to_json(outcome.rejects, outcome.conflicts) + "\n");
    if (f.json_output()) {
        out << report << '\n';
    } else {
        const auto& r = outcome.report;
        out << "events: " << r.events_in << " read, " << r.events_deduped << " after dedup (" << r.events_merged
            << " merged, " << r.events_conflicted << " in conflicting groups), " << r.records_rejected
            << " rejected\n"
            << "snapshots: " << r.snapshots_kept << " kept of " << r.snapshots_total << " (1-player "
            << r.snapshots_dropped_1player << ", unmatched " << r.snapshots_dropped_unmatched << ", no payouts "
            << r.snapshots_dropped_no_payouts << ", no results " << r.snapshots_dropped_no_results
            << ", inconsistent places " << r.snapshots_dropped_inconsistent_places << ", zero prizes "
            << r.snapshots_dropped_zero_prizes << ")\n"
            << "players: " << r.players_total << '\n';
    }
    return kOk;
}

template <typename Report>
void emit(const Report& rep, const std::string& out_dir, const std::string& stem, const std::string& plot_name,
          const CommonFlags& f, std::ostream& out) {
    const std::string js = report::to_json(rep);
    const std::string txt = report::to_text(rep);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_file(fs::path(out_dir) / (stem + ".json"), js + "\n");
        write_file(fs::path(out_dir) / (stem + ".txt"), txt);
        write_file(fs::path(out_dir) / plot_name, report::plot_data(rep));
    }
    out << (f.json_output() ? js + "\n" : txt);
}

int cmd_validate(const std::string& data, const std::string& out_dir, const CommonFlags& f, std::ostream& out,
                 std::ostream& err) {
    const auto snapshots = load_snapshots(data, err);
    if (snapshots.empty()) throw DataError("no usable snapshots in " + data);
    PairedErrorReport rep;
    try {
        rep = experiment1(snapshots, f.run_options());
    } catch (const stats::ZeroVarianceError& e) {
        throw DataError(std::string("baseline and ICM errors never differ: ") + e.what());
    }
    emit(rep, out_dir, "experiment1", "fig1_mse.csv", f, out);
    return kOk;
}

int cmd_stratify(const std::string& data, const std::string& out_dir, std::size_t max_players,
                 const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const auto snapshots = load_snapshots(data, err);
    if (snapshots.empty()) throw DataError("no usable snapshots in " + data);
    Experiment2Report rep;
    try {
        rep = experiment2(snapshots, f.run_options(), max_players);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    emit(rep, out_dir, "experiment2", "fig2_residuals.csv", f, out);
    return kOk;
}

int cmd_synth(const synthetic::SyntheticConfig& cfg, const std::string& out_path, std::ostream& out) {
    const auto events = synthetic::generate_events(cfg);
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw DataError("cannot write " + out_path);
    for (const auto& ev : events) os << ingest::serialize_event(ev) << '\n';
    out << "wrote " << events.size() << " events to " << out_path << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Independent chip model: equity, finish probabilities, and empirical validation", "icm"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::vector<Chips> chips;
    std::vector<double> payouts;
    std::string method = "auto";
    std::string data_path = data_default();
    std::string in_path = data_default();
    std::string out_dir;
    std::size_t max_players = kStratifyMaxPlayers;
    synthetic::SyntheticConfig synth;
    std::string synth_out;

    auto* equity = app.add_subcommand("equity", "expected prize share per player");
    equity->add_option("--stacks", chips, "chip counts, comma separated")->required()->delimiter(',');
    equity->add_option("--payouts", payouts, "prizes by place, comma separated")->required()->delimiter(',');
    equity->add_option("--method", method, "exact, mc or auto")
        ->check(CLI::IsMember({"exact", "mc", "auto"}))
        ->capture_default_str();
    add_common(equity, flags);

    auto* probs = app.add_subcommand("probs", "finish-place probability matrix");
    probs->add_option("--stacks", chips, "chip counts, comma separated")->required()->delimiter(',');
    probs->add_option("--method", method, "exact, naive, mc or auto")
        ->check(CLI::IsMember({"exact", "naive", "mc", "auto"}))
        ->capture_default_str();
    add_common(probs, flags);

    auto* ingest_cmd = app.add_subcommand("ingest", "canonical NDJSON events -> snapshot CSV and reports");
    ingest_cmd->add_option("--in", in_path, "NDJSON file or directory");
    ingest_cmd->add_option("--out", out_dir, "output directory")->required();
    add_common(ingest_cmd, flags);

    auto* validate = app.add_subcommand("validate", "MSE of ICM vs. rank-order baseline, paired t-test");
    validate->add_option("--data", data_path, "NDJSON file/directory or snapshots.csv");
    validate->add_option("--out", out_dir, "directory for report and plot files");
    add_common(validate, flags);

    auto* stratify = app.add_subcommand("stratify", "ICM residuals by stack-size quartile, one-sample t-tests");
    stratify->add_option("--data", data_path, "NDJSON file/directory or snapshots.csv");
    stratify->add_option("--out", out_dir, "directory for report and plot files");
    stratify->add_option("--max-players", max_players, "largest snapshot kept")
        ->check(CLI::Range(std::size_t{2}, kSubsetDpMaxPlayers))
        ->capture_default_str();
    add_common(stratify, flags);

    auto* synth_cmd = app.add_subcommand("synth", "write synthetic events with ICM-distributed outcomes");
    synth_cmd->add_option("--out", synth_out, "NDJSON output file")->required();
    synth_cmd->add_option("--events", synth.events)->capture_default_str();
    synth_cmd->add_option("--min-players", synth.min_players)->capture_default_str();
    synth_cmd->add_option("--max-players", synth.max_players)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (flags.min_sims > flags.max_sims) {
            err << "error: --min-sims must not exceed --max-sims\n";
            return kUsage;
        }
        if (*equity) return cmd_equity(chips, payouts, method, flags, out);
        if (*probs) return cmd_probs(chips, method, flags, out);
        if (*ingest_cmd) return cmd_ingest(in_path, out_dir, flags, out);
        if (*validate) return cmd_validate(data_path, out_dir, flags, out, err);
        if (*stratify) return cmd_stratify(data_path, out_dir, max_players, flags, out, err);
        if (*synth_cmd) return cmd_synth(synth, synth_out, out);
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::logic_error& e) {
        // Domain violations: bad stacks, mismatched ladders, fields too large.
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

}  // namespace icm::cli
