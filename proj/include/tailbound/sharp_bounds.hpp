#pragma once

// Two-sided "missing factor" expansions of P(S_n > x sigma) around
// Theta(x) * inf_lambda E e^{lambda (S_n - x sigma)}, and the upper bounds
// derived from them.

#include <optional>
#include <string>

#include "tailbound/dist_model.hpp"

namespace tailbound {

/// Berry-Esseen constants for the third-moment (delta = 1) bound.
struct BerryEsseenConstants {
    double C3_universal = 0.56;
    double C3_iid = 0.4784;
    double C3_binomial = 0.4215;
    double C3_lower = 0.4097;
    /// Required for delta < 1; no default is invented for that case.
    std::optional<double> C_2plusdelta;
};

enum class C3Policy { universal, iid, binomial };

/// The constant to use for a given delta. Throws invalid_parameter when
/// delta < 1 and no C_{2+delta} was supplied.
double select_constant(const BerryEsseenConstants& k, double delta,
                       C3Policy policy = C3Policy::universal);

struct ConstantsUsed {
    double C = 0.0;
    double B = 0.0;
    double delta = 1.0;
};

struct SharpInterval {
    std::string theorem;
    double lower = 0.0;
    double upper = 1.0;
    /// Theta-term times inf_mgf.
    double center = 0.0;
    /// Half-width multiplier before scaling by inf_mgf (eps_x, 16 B/sigma, c_x/sigma, ...).
    double epsilon_term = 0.0;
    double t_param = 0.0;
    double inf_mgf = 0.0;
    /// min(1, Theta + epsilon) * H_n; the Hoeffding-scaled form of the upper bound.
    double hoeffding_cap = 1.0;
    ConstantsUsed constants_used;
    bool valid = false;
    /// Largest admissible x for this theorem and model.
    double range_limit = 0.0;
    std::string note;
};

/// t = (2xB/sigma) / (1 + sqrt(1 - 4xB/sigma)); requires 0 <= xB/sigma < 0.25.
double t_param_21(double x, double sigma, double B);

/// eps_x of the delta-moment expansion.
double epsilon_x(const SumModel& model, double x, double B, double delta, double C);

/// Expansion under condition (A) and xi_i <= 1, for 0 <= x < 0.25 sigma/B.
SharpInterval theorem21_interval(const SumModel& model, double x, double B, double delta, double C);

/// Expansion around Theta(lambda_bar sigma_bar(lambda_bar)); B defaults to
/// max_i ess sup xi_i.
SharpInterval theorem31_interval(const SumModel& model, double x, double delta, double C,
                                 double B = 0.0);

/// Constant-16 expansion; B defaults to B_ratio (override may only increase it).
SharpInterval corollary22_interval(const SumModel& model, double x, double B = 0.0);

/// (1 - Phi(x_check)) (1 + 16 sqrt(2 pi) (1 + x_check) B/sigma).
double corollary23_upper(const SumModel& model, double x, double B = 0.0);

/// c_x of the sub-Gaussian bound.
double theorem22_cx(double x, double sigma, double B, double C3);

/// (1 - Phi(x)) (1 + sqrt(2 pi) c_x (1 + x) B/sigma), the form the proof
/// establishes. Requires xi_i <= sigma_i for every summand.
double theorem22_upper(const SumModel& model, double x, double C3 = 0.56, double B = 0.0);

/// t = (x/sigma) exp(e x^2 / (2 sigma^2)).
double theorem23_t(double x, double sigma);
/// c_x = 2.24 e^{t^2/2}/sqrt(1-t) + e^{t+t^2}/(sqrt(pi)(1-t)); requires t < 1.
double theorem23_cx(double x, double sigma);

/// Two-sided expansion for |xi_i| <= 1 and 0 <= x <= 0.606 sigma. Outside the
/// range the result is flagged invalid and carries only the Hoeffding cap.
SharpInterval theorem23_interval(const SumModel& model, double x);

}  // namespace tailbound
