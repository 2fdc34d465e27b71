#pragma once

// Cumulant Psi_n, its derivative B_n, the saddlepoint and the optimised
// exponential Markov bound.

#include "tailbound/dist_model.hpp"

namespace tailbound {

/// Psi_n(lambda) = sum_i log E e^{lambda xi_i}.
double cumulant(const SumModel& model, double lambda);

/// B_n(lambda) = Psi_n'(lambda) = sum_i E_lambda xi_i.
double cumulant_deriv(const SumModel& model, double lambda);

/// Psi_n''(lambda), the tilted variance sum.
double cumulant_second_deriv(const SumModel& model, double lambda);

struct Saddlepoint {
    double lambda_bar;
    double psi;
    /// -lambda_bar x sigma + Psi_n(lambda_bar) = log inf_lambda E e^{lambda(S_n - x sigma)}.
    double inf_log;
    double bracket_width;
};

/// Solves Psi_n'(lambda) = x sigma for lambda >= 0.
/// Throws no_saddlepoint when x sigma is not strictly below sum_i ess sup xi_i.
Saddlepoint solve_lambda_bar(const SumModel& model, double x);

/// inf_{lambda >= 0} E e^{lambda (S_n - x sigma)}.
double inf_mgf(const SumModel& model, double x);
double log_inf_mgf(const SumModel& model, double x);

/// E e^{lambda (S_n - x sigma)} at one lambda, in log form.
double log_mgf_objective(const SumModel& model, double x, double lambda);

/// Lambda*_n(y) = sup_{lambda >= 0} { lambda y - Psi_n(lambda) / n }; 0 for y <= 0.
double fenchel_legendre(const SumModel& model, double y);

struct RatePoint {
    double y;
    double rate;
    double lambda_bar;
};

RatePoint rate_point(const SumModel& model, double y);

}  // namespace tailbound
