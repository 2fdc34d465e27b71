#pragma once

// Conjugate (Esscher) measure P_lambda and numeric checks of the
// inequalities that control it.

#include <string>
#include <vector>

#include "tailbound/dist_model.hpp"

namespace tailbound {

/// One block of the model under P_lambda. The tilted law is no longer
/// centred, so it is kept as raw atoms rather than a DiscreteDistribution.
struct TiltedComponent {
    std::vector<Atom> atoms;
    std::int64_t multiplicity;
    /// b_i(lambda) = E_lambda xi_i.
    double mean;
    /// Var_lambda(xi_i).
    double variance;
};

struct TiltedState {
    double lambda;
    std::vector<TiltedComponent> components;
    /// B_n(lambda) = sum_i b_i(lambda).
    double Bn;
    /// sigma_bar^2(lambda) = sum_i Var_lambda(xi_i).
    double var_bar;
};

TiltedState tilt(const SumModel& model, double lambda);
/// Tilts an already tilted state further; tilt(tilt(m, a), b) ~ tilt(m, a + b).
TiltedState tilt(const TiltedState& state, double lambda);

/// sigma_bar^2 via E xi^2 e^{lambda xi}/E e^{lambda xi} - b_i^2; cross-check only.
double tilted_variance_mgf_ratio(const SumModel& model, double lambda);

enum class LemmaStatus { holds, violated, skipped };

const char* to_string(LemmaStatus status);

struct LemmaCheck {
    std::string name;
    LemmaStatus status;
    /// Smallest signed slack rhs - lhs, in units of sigma^2 (sigma_i^2 for
    /// the per-summand mgf lemmas, which are compared in log form).
    double worst_margin;
    double worst_lambda;
    std::string note;
};

struct LemmaSuiteReport {
    std::vector<LemmaCheck> checks;
    bool all_hold() const;
    const LemmaCheck* find(const std::string& name) const;
};

/// Evaluates each lemma inequality on the grid; lemmas whose hypotheses the
/// model does not satisfy are reported as skipped.
LemmaSuiteReport verify_lemma_suite(const SumModel& model, double B, double delta,
                                    const std::vector<double>& lambda_grid);

struct BerryEsseenReport {
    double lambda;
    double sigma_bar;
    double sup_distance;
    /// 2^{2+delta} C e^{B lambda} sum E|xi|^{2+delta} / sigma_bar^{2+delta}.
    double bound_general;
    /// 1.12 / sigma_bar; only meaningful when |xi_i| <= 1.
    double bound_two_sided;
    bool two_sided_applicable;
    bool holds;
};

/// Exact sup_y |P_lambda(Y_n/sigma_bar <= y) - Phi(y)| from the tilted
/// lattice convolution. B defaults to max_i ess sup xi_i when <= 0.
/// Throws unsupported for non-lattice models.
BerryEsseenReport berry_esseen_tilted(const SumModel& model, double lambda, double delta,
                                      double C, double B = 0.0);

}  // namespace tailbound
