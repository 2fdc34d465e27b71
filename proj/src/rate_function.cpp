#include "tailbound/rate_function.hpp"

#include <cmath>
#include <limits>

#include "tailbound/error.hpp"
#include "tailbound/numeric.hpp"

namespace tailbound {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kMaxExponent = 700.0;

}  // namespace

double cumulant(const SumModel& model, double lambda) {
    numeric::CompensatedSum s;
    for (const auto& c : model.components())
        s.add(static_cast<double>(c.multiplicity) * c.dist.log_mgf(lambda));
    return s.value();
}

double cumulant_deriv(const SumModel& model, double lambda) {
    numeric::CompensatedSum s;
    for (const auto& c : model.components())
        s.add(static_cast<double>(c.multiplicity) * c.dist.tilted_mean(lambda));
    return s.value();
}

double cumulant_second_deriv(const SumModel& model, double lambda) {
    numeric::CompensatedSum s;
    for (const auto& c : model.components())
        s.add(static_cast<double>(c.multiplicity) * c.dist.tilted_variance(lambda));
    return s.value();
}

Saddlepoint solve_lambda_bar(const SumModel& model, double x) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw Error(ErrorKind::invalid_parameter, "solve_lambda_bar: x must be finite and >= 0");
    const double target = x * model.sigma();
    if (target == 0.0) return {0.0, 0.0, 0.0, 0.0};

    const double sup = model.sum_upper();
    if (target >= sup * (1.0 - kRootTol))
        throw Error(ErrorKind::no_saddlepoint,
                    "x sigma is not strictly below the essential supremum of S_n");

    const double tol = kRootTol * std::max(1.0, target);
    const double cap = kMaxExponent / model.a_max();

    double lo = 0.0, hi = std::min(1.0, cap);
    while (cumulant_deriv(model, hi) < target) {
        if (hi >= cap)
            throw Error(ErrorKind::no_saddlepoint,
                        "saddlepoint lies beyond the representable tilt range");
        lo = hi;
        hi = std::min(2.0 * hi, cap);
    }

    // Safeguarded Newton on the non-decreasing function Psi_n' - target.
    double lambda = 0.5 * (lo + hi);
    for (int iter = 0; iter < 300; ++iter) {
        const double f = cumulant_deriv(model, lambda) - target;
        if (std::abs(f) <= tol) break;
        if (f < 0.0)
            lo = lambda;
        else
            hi = lambda;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        const double d = cumulant_second_deriv(model, lambda);
        double next = d > 0.0 ? lambda - f / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lambda = next;
    }

    const double psi = cumulant(model, lambda);
    return {lambda, psi, std::min(0.0, -lambda * target + psi), hi - lo};
}

double log_inf_mgf(const SumModel& model, double x) { return solve_lambda_bar(model, x).inf_log; }

double inf_mgf(const SumModel& model, double x) { return std::exp(log_inf_mgf(model, x)); }

double log_mgf_objective(const SumModel& model, double x, double lambda) {
    return -lambda * x * model.sigma() + cumulant(model, lambda);
}

RatePoint rate_point(const SumModel& model, double y) {
    if (!(y > 0.0)) return {y, 0.0, 0.0};
    const double n = static_cast<double>(model.n());
    const auto sp = solve_lambda_bar(model, n * y / model.sigma());
    return {y, -sp.inf_log / n, sp.lambda_bar};
}

double fenchel_legendre(const SumModel& model, double y) { return rate_point(model, y).rate; }

}  // namespace tailbound
