#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace icm::stats {

/// The sample has no spread, so a t statistic is undefined.
class ZeroVarianceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately avoids cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);
double incomplete_beta(double a, double b, double x);

/// P(T > t) for Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

/// log10 P(T > t); stays finite where the tail underflows a double.
double student_t_log10_sf(double t, double df);

/// t such that P(T > t) = upper_tail, for upper_tail in (0, 1).
double student_t_quantile_upper(double upper_tail, double df);

struct TTestResult {
    double t = 0.0;
    std::size_t df = 0;
    double p = 1.0;
    double log10_p = 0.0;
    double mean = 0.0;  // mean of the tested values (or differences)
    double standard_error = 0.0;
    std::size_t n = 0;
};

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator), two-pass.
double sample_sd(std::span<const double> xs);

/// H1: mean(a - b) > 0.
TTestResult paired_t_one_sided(std::span<const double> a, std::span<const double> b);

/// H1: mean(values) != 0.
TTestResult one_sample_t_two_sided(std::span<const double> values);

}  // namespace icm::stats
