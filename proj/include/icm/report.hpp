#pragma once

#include <string>

#include "icm/experiments.hpp"

namespace icm::report {

// Full-precision JSON; both embed kIndependenceCaveat.
std::string to_json(const PairedErrorReport& r);
std::string to_json(const Experiment2Report& r);

// Human-readable tables: MSE per estimator, mean residual per stratum.
std::string to_text(const PairedErrorReport& r);
std::string to_text(const Experiment2Report& r);

// Plot data: header "label,value,ci_low,ci_high", one row per bar, 95%
// Student-t confidence intervals.
std::string plot_data(const PairedErrorReport& r);
std::string plot_data(const Experiment2Report& r);

}  // namespace icm::report
