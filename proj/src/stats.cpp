#include "icm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace icm::stats {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    return h;
}

// log of x^a y^b / (a B(a, b)) * CF, i.e. log I_x(a, b) on the direct branch.
double log_direct_branch(double a, double b, double x, double y) {
    return a * std::log(x) + b * std::log(y) - log_beta(a, b) + std::log(beta_continued_fraction(a, b, x)) -
           std::log(a);
}

bool use_direct(double a, double b, double x) { return x < (a + 1.0) / (a + b + 2.0); }

void check_args(double t, double df) {
    if (!std::isfinite(t)) throw std::invalid_argument("student_t: t must be finite");
    if (!(df > 0.0) || !std::isfinite(df)) throw std::invalid_argument("student_t: df must be positive");
}

}  // namespace

double incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (y == 0.0) return 1.0;
    if (use_direct(a, b, x)) return std::exp(log_direct_branch(a, b, x, y));
    return 1.0 - std::exp(log_direct_branch(b, a, y, x));
}

double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

// For t > 0: P(T > t) = I_{df/(df+t^2)}(df/2, 1/2) / 2.
double student_t_sf(double t, double df) {
    check_args(t, df);
    if (t == 0.0) return 0.5;
    const double t2 = t * t;
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x, y);
    return t > 0.0 ? tail : 1.0 - tail;
}

double student_t_log10_sf(double t, double df) {
    check_args(t, df);
    if (t <= 0.0) return std::log10(student_t_sf(t, df));
    const double t2 = t * t;
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    const double a = 0.5 * df, b = 0.5;
    double ln_ibeta;
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (use_direct(a, b, x)) {
        ln_ibeta = log_direct_branch(a, b, x, y);
    } else {
        ln_ibeta = std::log1p(-std::exp(log_direct_branch(b, a, y, x)));
    }
    return (ln_ibeta + std::log(0.5)) / std::log(10.0);
}

double student_t_quantile_upper(double upper_tail, double df) {
    if (!(upper_tail > 0.0 && upper_tail < 1.0))
        throw std::invalid_argument("student_t_quantile_upper: tail must lie in (0, 1)");
    if (upper_tail == 0.5) return 0.0;
    if (upper_tail > 0.5) return -student_t_quantile_upper(1.0 - upper_tail, df);
    double lo = 0.0, hi = 1.0;
    while (student_t_sf(hi, df) > upper_tail) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_sf(mid, df) > upper_tail ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double v : xs) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

TTestResult one_sample(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("t-test: need at least 2 values");
    TTestResult r;
    r.n = values.size();
    r.df = r.n - 1;
    r.mean = mean(values);
    const double sd = sample_sd(values);
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    // Differences of equal-offset doubles can pick up last-bit noise.
    if (scale == 0.0 || sd <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
        throw ZeroVarianceError("t-test: sample variance is zero");
    r.standard_error = sd / std::sqrt(static_cast<double>(r.n));
    r.t = r.mean / r.standard_error;
    return r;
}

}  // namespace

TTestResult paired_t_one_sided(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("paired_t_one_sided: samples have different lengths (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    TTestResult r = one_sample(d);
    const double df = static_cast<double>(r.df);
    r.p = student_t_sf(r.t, df);
    r.log10_p = student_t_log10_sf(r.t, df);
    return r;
}

TTestResult one_sample_t_two_sided(std::span<const double> values) {
    TTestResult r = one_sample(values);
    const double df = static_cast<double>(r.df);
    r.p = std::min(1.0, 2.0 * student_t_sf(std::abs(r.t), df));
    r.log10_p = std::min(0.0, std::log10(2.0) + student_t_log10_sf(std::abs(r.t), df));
    return r;
}

}  // namespace icm::stats
