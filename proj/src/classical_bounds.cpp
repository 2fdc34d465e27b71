#include "tailbound/classical_bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tailbound/error.hpp"

namespace tailbound {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Backward evaluation of the Laplace continued fraction
//   erfcx(z) = 1/sqrt(pi) * 1/(z + (1/2)/(z + (2/2)/(z + (3/2)/(z + ...)))).
// 40 levels reach full double precision for z >= 5.
double erfcx_continued_fraction(double z) {
    double t = 0.0;
    for (int k = 40; k >= 1; --k) t = (0.5 * k) / (z + t);
    return 1.0 / (std::sqrt(std::numbers::pi) * (z + t));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double erfcx(double z) {
    if (z < 0.0) {
        // Only used for z >= 0 internally; keep the identity for completeness.
        return 2.0 * std::exp(z * z) - erfcx(-z);
    }
    if (z >= 5.0) return erfcx_continued_fraction(z);
    // exp(z^2) with the rounding error of z*z folded back in.
    const double hi = z * z;
    const double lo = std::fma(z, z, -hi);
    return std::exp(hi) * (1.0 + lo) * std::erfc(z);
}

double mills_ratio(double x) {
    if (!(x >= 0.0)) throw Error(ErrorKind::invalid_parameter, "mills_ratio: x must be >= 0");
    if (std::isinf(x)) return 0.0;
    return 0.5 * erfcx(x * kInvSqrt2);
}

std::string_view to_string(BoundName name) {
    switch (name) {
        case BoundName::bennett: return "bennett";
        case BoundName::hoeffding: return "hoeffding";
        case BoundName::bernstein: return "bernstein";
    }
    return "unknown";
}

double log_bennett_bound(double x, double sigma) {
    if (x == 0.0) return 0.0;
    return -(sigma * x + sigma * sigma) * std::log1p(x / sigma) + x * sigma;
}

BoundValue bennett_bound(double x, double sigma) {
    const bool valid = x >= 0.0 && sigma > 0.0;
    if (!valid) return {1.0, BoundName::bennett, false};
    return {std::exp(log_bennett_bound(x, sigma)), BoundName::bennett, true};
}

double log_hoeffding_bound(double x, double sigma, std::int64_t n) {
    if (x == 0.0) return 0.0;
    const double nn = static_cast<double>(n);
    double xs = x * sigma;
    // x sigma within rounding of n is the boundary point, where the
    // convention (n/(n-x sigma))^{n-x sigma} = 1 applies.
    if (xs > nn * (1.0 + 1e-12)) return -std::numeric_limits<double>::infinity();
    if (xs > nn) xs = nn;
    const double s2 = sigma * sigma;
    double inner = -(xs + s2) * std::log1p(x / sigma);
    if (xs < nn) inner -= (nn - xs) * std::log1p(-xs / nn);
    return nn / (nn + s2) * inner;
}

BoundValue hoeffding_bound(double x, double sigma, std::int64_t n) {
    const bool valid = x >= 0.0 && sigma > 0.0 && n >= 1;
    if (!valid) return {1.0, BoundName::hoeffding, false};
    return {std::exp(log_hoeffding_bound(x, sigma, n)), BoundName::hoeffding, true};
}

double x_check(double x, double sigma) { return x / std::sqrt(1.0 + x / (3.0 * sigma)); }

BoundValue bernstein_bound(double x, double sigma) {
    const bool valid = x >= 0.0 && sigma > 0.0;
    if (!valid) return {1.0, BoundName::bernstein, false};
    const double xc = x_check(x, sigma);
    return {std::exp(-0.5 * xc * xc), BoundName::bernstein, true};
}

}  // namespace tailbound
