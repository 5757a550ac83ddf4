#include "icm/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace icm::report {

using nlohmann::json;

namespace {

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

// Mantissa x 10^exp, the way the tables print.
std::string sci(double v, int digits = 2) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

std::string pvalue(double p, double log10_p) {
    char buf[64];
    if (p >= 0.001) {
        std::snprintf(buf, sizeof buf, "%.3f", p);
    } else if (p > 0.0 && log10_p > -300) {
        std::snprintf(buf, sizeof buf, "%.2e", p);
    } else {
        std::snprintf(buf, sizeof buf, "< 1e%d", static_cast<int>(std::ceil(log10_p)));
    }
    return buf;
}

double t975(std::size_t df) { return stats::student_t_quantile_upper(0.025, static_cast<double>(df)); }

std::string csv_row(const std::string& label, double value, double half_width) {
    std::ostringstream os;
    os.precision(17);
    os << label << ',' << value << ',' << value - half_width << ',' << value + half_width << '\n';
    return os.str();
}

}  // namespace

std::string to_json(const PairedErrorReport& r) {
    json doc = {
        {"experiment", "icm_vs_baseline_mse"},
        {"mse_baseline", r.mse_baseline},
        {"se_mse_baseline", r.se_mse_baseline},
        {"mse_icm", r.mse_icm},
        {"se_mse_icm", r.se_mse_icm},
        {"t_statistic", r.t_statistic},
        {"degrees_of_freedom", r.degrees_of_freedom},
        {"p_value_one_sided", r.p_value_one_sided},
        {"log10_p_value", r.log10_p_value},
        {"alternative", "mse_baseline > mse_icm"},
        {"n_players", r.n_players},
        {"n_snapshots", r.n_snapshots},
        {"n_sampled_snapshots", r.n_sampled_snapshots},
        {"caveat", std::string(kIndependenceCaveat)},
    };
    return doc.dump(2);
}

std::string to_json(const Experiment2Report& r) {
    json strata = json::array();
    for (const auto& s : r.strata) {
        strata.push_back({
            {"stratum", std::string(to_string(s.stratum))},
            {"n_players", s.n_players},
            {"mean_residual", s.mean_residual},
            {"se_residual", s.se_residual},
            {"t_statistic", optional_json(s.t_statistic)},
            {"degrees_of_freedom", optional_json(s.degrees_of_freedom)},
            {"p_value_two_sided", optional_json(s.p_value_two_sided)},
            {"log10_p_value", optional_json(s.log10_p_value)},
            {"note", s.note},
        });
    }
    json doc = {
        {"experiment", "icm_residuals_by_stack_size"},
        {"residual", "observed - estimated"},
        {"max_players", r.max_players},
        {"n_snapshots", r.n_snapshots},
        {"n_players", r.n_players},
        {"strata", std::move(strata)},
        {"caveat", std::string(kIndependenceCaveat)},
    };
    return doc.dump(2);
}

std::string to_text(const PairedErrorReport& r) {
    std::ostringstream os;
    os << "MSE of the baseline and the ICM (standard errors in brackets)\n"
       << "  Algorithm  MSE\n"
       << "  Baseline   " << sci(r.mse_baseline) << " (" << sci(r.se_mse_baseline, 0) << ")\n"
       << "  ICM        " << sci(r.mse_icm) << " (" << sci(r.se_mse_icm, 0) << ")\n\n"
       << "  one-sided paired t-test, baseline > ICM: t = " << r.t_statistic << ", df = " << r.degrees_of_freedom
       << ", p " << (r.p_value_one_sided >= 0.001 ? "= " : "") << pvalue(r.p_value_one_sided, r.log10_p_value)
       << " (log10 p = " << r.log10_p_value << ")\n"
       << "  players = " << r.n_players << ", snapshots = " << r.n_snapshots
       << " (Monte Carlo: " << r.n_sampled_snapshots << ")\n\n"
       << "Note: " << kIndependenceCaveat << '\n';
    return os.str();
}

std::string to_text(const Experiment2Report& r) {
    std::ostringstream os;
    os << "Mean ICM residual (observed - estimated) by stack size, snapshots with <= " << r.max_players
       << " players\n"
       << "  Group           n        Mean residual (SE)        p-value\n";
    for (const auto& s : r.strata) {
        char line[160];
        const std::string label = std::string(to_string(s.stratum)) + " stacks";
        const std::string mean = sci(s.mean_residual) + " (" + sci(s.se_residual, 0) + ")";
        const std::string p = s.p_value_two_sided ? pvalue(*s.p_value_two_sided, *s.log10_p_value) : "n/a";
        std::snprintf(line, sizeof line, "  %-14s %6zu   %-24s  %s", label.c_str(), s.n_players, mean.c_str(),
                      p.c_str());
        os << line;
        if (!s.note.empty()) os << "  [" << s.note << ']';
        os << '\n';
    }
    os << "  snapshots = " << r.n_snapshots << ", players = " << r.n_players << "\n\n"
       << "Note: " << kIndependenceCaveat << '\n';
    return os.str();
}

std::string plot_data(const PairedErrorReport& r) {
    const double q = t975(r.n_players > 1 ? r.n_players - 1 : 1);
    return "label,value,ci_low,ci_high\n" + csv_row("baseline", r.mse_baseline, q * r.se_mse_baseline) +
           csv_row("icm", r.mse_icm, q * r.se_mse_icm);
}

std::string plot_data(const Experiment2Report& r) {
    std::string out = "label,value,ci_low,ci_high\n";
    for (const auto& s : r.strata) {
        const double q = s.n_players > 1 ? t975(s.n_players - 1) : 0.0;
        out += csv_row(std::string(to_string(s.stratum)), s.mean_residual, q * s.se_residual);
    }
    return out;
}

}  // namespace icm::report
