#pragma once

// Small numeric kernels shared by the bound and measure modules.

#include <cmath>
#include <limits>
#include <span>

namespace tailbound::numeric {

/// exp(y) - 1 - y without cancellation for small |y|.
inline double expm1_minus_x(double y) {
    if (std::abs(y) < 0.5) {
        double term = y * y / 2.0;
        double sum = term;
        for (int k = 3; k < 60; ++k) {
            term *= y / k;
            sum += term;
            if (std::abs(term) <= std::abs(sum) * 1e-18) break;
        }
        return sum;
    }
    return std::expm1(y) - y;
}

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace tailbound::numeric
