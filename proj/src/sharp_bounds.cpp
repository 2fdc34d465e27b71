#include "tailbound/sharp_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tailbound/classical_bounds.hpp"
#include "tailbound/error.hpp"
#include "tailbound/rate_function.hpp"

namespace tailbound {

namespace {

constexpr double kSlack = 1.0 + 1e-12;
const double kSqrtPi = std::sqrt(std::numbers::pi);
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

void require(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) throw Error(kind, what);
}

double hoeffding_of(const SumModel& model, double x) {
    return hoeffding_bound(x, model.sigma(), model.n()).value;
}

// Result for x outside the admissible range: only min(1, .) * H_n survives.
SharpInterval out_of_range(std::string theorem, const SumModel& model, double x, double limit,
                           double cap_factor = 1.0) {
    SharpInterval s;
    s.theorem = std::move(theorem);
    s.valid = false;
    s.range_limit = limit;
    s.hoeffding_cap = std::min(1.0, cap_factor) * hoeffding_of(model, x);
    s.lower = 0.0;
    s.center = 0.0;
    s.upper = std::min(1.0, s.hoeffding_cap);
    s.note = "x outside admissible range; only the Hoeffding-capped upper bound is reported";
    return s;
}

// Fills center/lower/upper from a Theta value and a band, both multiplying inf_mgf.
void fill(SharpInterval& s, double theta, double band, double inf, double hoeffding) {
    s.inf_mgf = inf;
    s.epsilon_term = band;
    s.center = theta * inf;
    s.lower = std::max(0.0, theta - band) * inf;
    s.upper = std::min(theta + band, 1.0) * inf;
    s.hoeffding_cap = std::min(1.0, theta + band) * hoeffding;
    s.valid = true;
}

double resolve_ratio_B(const SumModel& model, double B) {
    const double ratio = moment_profile(model, 1.0).B_ratio;
    if (B <= 0.0) return ratio;
    require(B >= ratio / kSlack, ErrorKind::hypothesis_violation,
            "B must be at least max_i E|xi_i|^3 / E xi_i^2");
    return B;
}

}  // namespace

double select_constant(const BerryEsseenConstants& k, double delta, C3Policy policy) {
    if (delta < 1.0) {
        require(k.C_2plusdelta.has_value(), ErrorKind::invalid_parameter,
                "delta < 1 requires a user-supplied C_{2+delta}");
        return *k.C_2plusdelta;
    }
    switch (policy) {
        case C3Policy::iid: return k.C3_iid;
        case C3Policy::binomial: return k.C3_binomial;
        case C3Policy::universal: break;
    }
    return k.C3_universal;
}

double t_param_21(double x, double sigma, double B) {
    const double r = x * B / sigma;
    require(r >= 0.0 && r < 0.25, ErrorKind::out_of_range, "t_param_21 requires 0 <= xB/sigma < 0.25");
    return 2.0 * r / (1.0 + std::sqrt(1.0 - 4.0 * r));
}

double epsilon_x(const SumModel& model, double x, double B, double delta, double C) {
    const double sigma = model.sigma();
    const double t = t_param_21(x, sigma, B);
    const double lyapunov = moment_profile(model, delta).abs_moment_sum / std::pow(sigma, 2.0 + delta);
    const double one_m = 1.0 - 2.0 * t;
    return std::exp(t) / one_m *
           (1.58 / kSqrtPi * B / sigma +
            std::pow(2.0, 3.0 + delta) * C / std::pow(one_m, delta / 2.0) * lyapunov);
}

SharpInterval theorem21_interval(const SumModel& model, double x, double B, double delta, double C) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    require(model.a_max() <= kSlack, ErrorKind::hypothesis_violation, "theorem 2.1 requires xi_i <= 1");
    require(B > 0.0, ErrorKind::invalid_parameter, "B must be > 0");
    require(condition_A_holds(model, B, delta), ErrorKind::hypothesis_violation,
            "condition (A) does not hold for the given B and delta");
    const double sigma = model.sigma();
    const double limit = 0.25 * sigma / B;
    if (!(x < limit)) return out_of_range("theorem21", model, x, limit);

    SharpInterval s;
    s.theorem = "theorem21";
    s.range_limit = limit;
    s.t_param = t_param_21(x, sigma, B);
    s.constants_used = {C, B, delta};
    fill(s, mills_ratio(x), epsilon_x(model, x, B, delta, C), inf_mgf(model, x), hoeffding_of(model, x));
    return s;
}

SharpInterval theorem31_interval(const SumModel& model, double x, double delta, double C, double B) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    if (B <= 0.0) B = model.a_max();
    require(model.a_max() <= B * kSlack, ErrorKind::hypothesis_violation, "theorem 3.1 requires xi_i <= B");
    const auto sp = solve_lambda_bar(model, x);
    const double sigma_bar = std::sqrt(cumulant_second_deriv(model, sp.lambda_bar));
    const double lyapunov = moment_profile(model, delta).abs_moment_sum;
    const double band = std::pow(2.0, 3.0 + delta) * C * std::exp(B * sp.lambda_bar) /
                        std::pow(sigma_bar, 2.0 + delta) * lyapunov;
    const double inf = std::exp(sp.inf_log);

    SharpInterval s;
    s.theorem = "theorem31";
    s.range_limit = model.sum_upper() / model.sigma();
    s.t_param = sp.lambda_bar;
    s.constants_used = {C, B, delta};
    const double cap = model.a_max() <= kSlack ? hoeffding_of(model, x) : inf;
    fill(s, mills_ratio(sp.lambda_bar * sigma_bar), band, inf, cap);
    return s;
}

SharpInterval corollary22_interval(const SumModel& model, double x, double B) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    require(model.a_max() <= kSlack, ErrorKind::hypothesis_violation, "corollary 2.2 requires xi_i <= 1");
    B = resolve_ratio_B(model, B);
    const double sigma = model.sigma();
    const double limit = 0.1 * sigma / B;
    if (!(x <= limit)) return out_of_range("corollary22", model, x, limit);

    SharpInterval s;
    s.theorem = "corollary22";
    s.range_limit = limit;
    s.constants_used = {0.56, B, 1.0};
    fill(s, mills_ratio(x), 16.0 * B / sigma, inf_mgf(model, x), hoeffding_of(model, x));
    return s;
}

double corollary23_upper(const SumModel& model, double x, double B) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    require(model.a_max() <= kSlack, ErrorKind::hypothesis_violation, "corollary 2.3 requires xi_i <= 1");
    B = resolve_ratio_B(model, B);
    const double sigma = model.sigma();
    require(x <= 0.1 * sigma / B, ErrorKind::out_of_range, "corollary 2.3 requires x <= 0.1 sigma/B");
    const double xc = x_check(x, sigma);
    return normal_sf(xc) * (1.0 + 16.0 * kSqrt2Pi * (1.0 + xc) * B / sigma);
}

double theorem22_cx(double x, double sigma, double B, double C3) {
    const double t = t_param_21(x, sigma, B);
    return std::exp(t + t * t) / (1.0 - t) *
           (std::sqrt(2.0) + 16.0 * kSqrt2Pi * C3 * std::exp(0.5 * t * t) / std::sqrt(1.0 - t));
}

double theorem22_upper(const SumModel& model, double x, double C3, double B) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    for (const auto& c : model.components())
        require(c.dist.upper() <= std::sqrt(c.dist.variance()) * kSlack, ErrorKind::hypothesis_violation,
                "theorem 2.2 requires xi_i <= sigma_i for every summand");
    B = resolve_ratio_B(model, B);
    const double sigma = model.sigma();
    require(x < 0.25 * sigma / B, ErrorKind::out_of_range, "theorem 2.2 requires x < 0.25 sigma/B");
    const double cx = theorem22_cx(x, sigma, B, C3);
    return normal_sf(x) * (1.0 + kSqrt2Pi * cx * (1.0 + x) * B / sigma);
}

double theorem23_t(double x, double sigma) {
    const double r = x / sigma;
    return r * std::exp(std::numbers::e * r * r / 2.0);
}

double theorem23_cx(double x, double sigma) {
    const double t = theorem23_t(x, sigma);
    require(t < 1.0, ErrorKind::out_of_range, "theorem 2.3 constant requires t < 1");
    return 2.24 * std::exp(0.5 * t * t) / std::sqrt(1.0 - t) +
           std::exp(t + t * t) / (kSqrtPi * (1.0 - t));
}

SharpInterval theorem23_interval(const SumModel& model, double x) {
    require(x >= 0.0, ErrorKind::invalid_parameter, "x must be >= 0");
    require(model.abs_max() <= kSlack, ErrorKind::hypothesis_violation, "theorem 2.3 requires |xi_i| <= 1");
    const double sigma = model.sigma();
    const double limit = 0.606 * sigma;
    if (!(x <= limit)) {
        const double t = theorem23_t(x, sigma);
        const double factor = t < 1.0 ? mills_ratio(x) + theorem23_cx(x, sigma) / sigma : 1.0;
        auto s = out_of_range("theorem23", model, x, limit, factor);
        s.t_param = t;
        return s;
    }
    SharpInterval s;
    s.theorem = "theorem23";
    s.range_limit = limit;
    s.t_param = theorem23_t(x, sigma);
    s.constants_used = {0.56, 1.0, 1.0};
    fill(s, mills_ratio(x), theorem23_cx(x, sigma) / sigma, inf_mgf(model, x), hoeffding_of(model, x));
    return s;
}

}  // namespace tailbound
