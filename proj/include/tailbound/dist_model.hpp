#pragma once

// Bounded mean-zero discrete laws and sums of independent copies of them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tailbound {

struct Atom {
    double value;
    double prob;
};

/// Finite-support law of one summand xi_i.
///
/// Construction enforces: at least two atoms, finite values, strictly
/// positive probabilities summing to 1 (1e-12), and mean zero (1e-12
/// absolute). Inputs are never recentred or renormalised.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const { return atoms_; }
    double upper() const { return upper_; }
    double lower() const { return lower_; }
    /// E xi^2.
    double variance() const { return variance_; }

    /// log E exp(lambda xi), accurate for small lambda.
    double log_mgf(double lambda) const;
    /// E xi exp(lambda xi) / E exp(lambda xi), the tilted mean.
    double tilted_mean(double lambda) const;
    /// E xi^k exp(lambda xi) / E exp(lambda xi).
    double tilted_raw_moment(double lambda, int k) const;
    /// Variance of xi under the tilted law, from the tilted atoms.
    double tilted_variance(double lambda) const;

private:
    std::vector<Atom> atoms_;
    double upper_ = 0.0;
    double lower_ = 0.0;
    double variance_ = 0.0;
};

/// Validation without throwing; returns the first violated invariant or "".
std::string validate_atoms(std::span<const Atom> atoms);

/// sum |value|^p prob.
double abs_moment(const DiscreteDistribution& dist, double p);

/// Two-point extremal law: P(1) = v/(1+v), P(-v) = 1/(1+v).
DiscreteDistribution hoeffding_eta(double v);

DiscreteDistribution rademacher();

struct Component {
    DiscreteDistribution dist;
    std::int64_t multiplicity;
};

/// S_n as a list of independent blocks of i.i.d. summands.
class SumModel {
public:
    explicit SumModel(std::vector<Component> components);

    std::span<const Component> components() const { return components_; }
    std::int64_t n() const { return n_; }
    double sigma2() const { return sigma2_; }
    double sigma() const { return sigma_; }
    /// max_i ess sup xi_i.
    double a_max() const { return a_max_; }
    /// min_i ess inf xi_i.
    double a_min() const { return a_min_; }
    /// max_i |xi_i|.
    double abs_max() const;
    /// sum_i ess sup xi_i = sup_lambda Psi_n'(lambda).
    double sum_upper() const { return sum_upper_; }
    double sum_lower() const { return sum_lower_; }

private:
    std::vector<Component> components_;
    std::int64_t n_ = 0;
    double sigma2_ = 0.0;
    double sigma_ = 0.0;
    double a_max_ = 0.0;
    double a_min_ = 0.0;
    double sum_upper_ = 0.0;
    double sum_lower_ = 0.0;
};

SumModel iid_model(const DiscreteDistribution& dist, std::int64_t n);
SumModel rademacher_model(std::int64_t n);
/// n i.i.d. copies of hoeffding_eta(v).
SumModel eta_model(double v, std::int64_t n);

struct MomentProfile {
    double delta;
    /// Smallest B with E|xi_i|^{2+delta} <= B^{2+delta} for every i.
    double B_abs;
    /// Smallest B with E|xi_i|^3 <= B E xi_i^2 for every i.
    double B_ratio;
    /// sum_i E|xi_i|^{2+delta}, multiplicities included.
    double abs_moment_sum;
};

MomentProfile moment_profile(const SumModel& model, double delta);

struct ConditionAReport {
    bool holds;
    double worst_margin;
    double worst_lambda;
};

/// Evaluates sum E xi^2 e^{lambda xi} - (1 - B lambda) sigma^2 on the grid.
/// The curvature half of condition (A) only; the moment half is
/// `moment_profile(model, delta).B_abs <= B`.
ConditionAReport check_condition_A(const SumModel& model, double B,
                                   std::span<const double> lambda_grid);

/// 0 followed by 200 log-spaced points in [1e-6, 10/B].
std::vector<double> default_condition_A_grid(double B);

/// Both halves of condition (A) for the given B and delta, using the exact
/// sufficient criterion B >= B_ratio when delta == 1 and the grid otherwise.
bool condition_A_holds(const SumModel& model, double B, double delta);

}  // namespace tailbound
