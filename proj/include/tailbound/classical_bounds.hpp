#pragma once

// Closed-form tail bounds for sums of summands bounded above by 1, and the
// normal-tail special functions they are compared against.

#include <cstdint>
#include <string_view>

namespace tailbound {

double normal_cdf(double x);
/// 1 - Phi(x), accurate in the far right tail.
double normal_sf(double x);

/// exp(z^2) erfc(z), finite for all z >= 0.
double erfcx(double z);

/// Theta(x) = (1 - Phi(x)) e^{x^2/2}. Throws invalid_parameter for x < 0.
double mills_ratio(double x);

enum class BoundName { bennett, hoeffding, bernstein };

std::string_view to_string(BoundName name);

struct BoundValue {
    double value;
    BoundName name;
    bool valid;
};

/// B(x, sigma) = ((x+sigma)/sigma)^{-sigma x - sigma^2} e^{x sigma}.
BoundValue bennett_bound(double x, double sigma);
double log_bennett_bound(double x, double sigma);

/// H_n(x, sigma); exactly 0 once x sigma exceeds n.
BoundValue hoeffding_bound(double x, double sigma, std::int64_t n);
/// log H_n(x, sigma); -inf beyond the support.
double log_hoeffding_bound(double x, double sigma, std::int64_t n);

/// x / sqrt(1 + x / (3 sigma)).
double x_check(double x, double sigma);

/// exp(-x_check^2 / 2).
BoundValue bernstein_bound(double x, double sigma);

}  // namespace tailbound
