#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "icm/exact.hpp"
#include "icm/ingest.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "icm");
    std::ostringstream out, err;
    const int code = icm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("icm_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("equity table and json") {
        const auto table = invoke({"equity", "--stacks", "50,30,20", "--payouts", "50,30,20"});
        CHECK(table.code == 0);
        CHECK(table.out.find("0.38392857") != std::string::npos);
        CHECK(table.out.find("0.32750000") != std::string::npos);

        const auto js = invoke({"equity", "--stacks", "50,30,20", "--payouts", "0.5,0.3,0.2", "--output-format", "json"});
        REQUIRE(js.code == 0);
        const auto doc = json::parse(js.out);
        CHECK(doc["method"] == "exact");
        CHECK(doc["standard_errors"].is_null());
        // Full precision survives the round trip.
        const std::vector<icm::Chips> chips{50, 30, 20};
        const auto direct = icm::icm_equity(icm::normalize_stacks(chips), icm::PayoutLadder({0.5, 0.3, 0.2}, true));
        CHECK(doc["equities"].get<std::vector<double>>() == direct.equities());
    }

    TEST_CASE("equity pads short ladders and warns on non-monotone ones") {
        const auto r = invoke({"equity", "--stacks", "1,1,1,1", "--payouts", "3,1", "--output-format", "json"});
        REQUIRE(r.code == 0);
        const auto eq = json::parse(r.out)["equities"].get<std::vector<double>>();
        for (double e : eq) CHECK(e == doctest::Approx(0.25));

        const auto w = invoke({"equity", "--stacks", "5,3", "--payouts", "1,2", "--output-format", "json"});
        REQUIRE(w.code == 0);
        CHECK_FALSE(json::parse(w.out)["warnings"].empty());
    }

    TEST_CASE("equity by Monte Carlo reports standard errors") {
        const auto r = invoke({"equity", "--stacks", "50,30,20", "--payouts", "5,3,2", "--method", "mc", "--seed", "7",
                               "--output-format", "json"});
        REQUIRE(r.code == 0);
        const auto doc = json::parse(r.out);
        CHECK(doc["method"] == "mc");
        CHECK(doc["standard_errors"].size() == 3);
        CHECK(doc["simulations"].get<int>() >= 100);
        CHECK(invoke({"equity", "--stacks", "50,30,20", "--payouts", "5,3,2", "--method", "mc", "--seed", "7",
                      "--output-format", "json"})
                  .out == r.out);
    }

    TEST_CASE("probs") {
        const auto r = invoke({"probs", "--stacks", "70,30", "--output-format", "json"});
        REQUIRE(r.code == 0);
        const auto m = json::parse(r.out)["matrix"].get<std::vector<std::vector<double>>>();
        CHECK(m[0][0] == doctest::Approx(0.7));
        CHECK(m[0][1] == doctest::Approx(0.3));
        CHECK(m[1][0] == doctest::Approx(0.3));
        CHECK(m[1][1] == doctest::Approx(0.7));

        const auto naive = invoke({"probs", "--stacks", "5,3,2", "--method", "naive", "--output-format", "json"});
        CHECK(json::parse(naive.out)["matrix"][1][1].get<double>() == doctest::Approx(0.375));
        CHECK(invoke({"probs", "--stacks", "1,1,1,1,1,1,1,1", "--method", "naive"}).code == 2);
    }

    TEST_CASE("usage and data errors") {
        CHECK(invoke({}).code == 1);
        CHECK(invoke({"bogus"}).code == 1);
        CHECK(invoke({"equity", "--stacks", "1,2"}).code == 1);
        CHECK(invoke({"equity", "--stacks", "1,x", "--payouts", "1"}).code == 1);
        CHECK(invoke({"equity", "--stacks", "1,2", "--payouts", "1", "--output-format", "xml"}).code == 1);
        CHECK(invoke({"equity", "--stacks", "1,2", "--payouts", "1", "--min-sims", "500", "--max-sims", "100"}).code == 1);
        const auto zero = invoke({"equity", "--stacks", "100,0,50", "--payouts", "1"});
        CHECK(zero.code == 2);
        CHECK_FALSE(zero.err.empty());
        CHECK(invoke({"equity", "--stacks", "1,2", "--payouts", "0,0"}).code == 2);
        CHECK(invoke({"--help"}).code == 0);
    }

    TEST_CASE("validate on an empty directory is a data error") {
        TempDir dir("empty");
        const auto r = invoke({"validate", "--data", dir.path.string()});
        CHECK(r.code == 2);
        CHECK_FALSE(r.err.empty());
        CHECK(invoke({"stratify", "--data", (dir.path / "missing.csv").string()}).code == 2);
    }

    TEST_CASE("synth, ingest, validate and stratify end to end") {
        TempDir dir("e2e");
        const auto events = dir.path / "events.jsonl";
        REQUIRE(invoke({"synth", "--out", events.string(), "--events", "300", "--seed", "5"}).code == 0);

        const auto out = dir.path / "ingested";
        const auto ing = invoke({"ingest", "--in", events.string(), "--out", out.string()});
        REQUIRE(ing.code == 0);
        for (const char* f : {"snapshots.csv", "ingest_report.json", "rejects.json"}) CHECK(fs::exists(out / f));
        const auto report = json::parse(slurp(out / "ingest_report.json"));
        CHECK(report["snapshots_kept"] == 300);
        CHECK(report["snapshots_dropped_1player"] == 300);

        const auto csv = (out / "snapshots.csv").string();
        const auto v_csv = invoke({"validate", "--data", csv, "--out", out.string(), "--output-format", "json"});
        REQUIRE(v_csv.code == 0);
        const auto v_raw = invoke({"validate", "--data", events.string(), "--output-format", "json"});
        REQUIRE(v_raw.code == 0);
        CHECK(v_csv.out == v_raw.out);
        const auto e1 = json::parse(v_csv.out);
        CHECK(e1["mse_icm"].get<double>() < e1["mse_baseline"].get<double>());
        for (const char* f : {"experiment1.json", "experiment1.txt", "fig1_mse.csv"}) CHECK(fs::exists(out / f));

        const auto s = invoke({"stratify", "--data", csv, "--out", out.string()});
        REQUIRE(s.code == 0);
        CHECK(s.out.find("large") != std::string::npos);
        for (const char* f : {"experiment2.json", "experiment2.txt", "fig2_residuals.csv"}) CHECK(fs::exists(out / f));
        CHECK(invoke({"stratify", "--data", csv, "--max-players", "1"}).code != 0);
    }
}
