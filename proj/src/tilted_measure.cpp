#include "tailbound/tilted_measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tailbound/classical_bounds.hpp"
#include "tailbound/error.hpp"
#include "tailbound/lattice.hpp"
#include "tailbound/numeric.hpp"
#include "tailbound/rate_function.hpp"

namespace tailbound {

namespace {

TiltedComponent tilt_atoms(std::span<const Atom> atoms, std::int64_t multiplicity, double lambda) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms) m = std::max(m, lambda * a.value);
    TiltedComponent out{{}, multiplicity, 0.0, 0.0};
    numeric::CompensatedSum z;
    for (const auto& a : atoms) {
        const double w = a.prob * std::exp(lambda * a.value - m);
        out.atoms.push_back({a.value, w});
        z.add(w);
    }
    numeric::CompensatedSum mean;
    for (auto& a : out.atoms) {
        a.prob /= z.value();
        mean.add(a.prob * a.value);
    }
    out.mean = mean.value();
    numeric::CompensatedSum var;
    for (const auto& a : out.atoms) var.add(a.prob * (a.value - out.mean) * (a.value - out.mean));
    out.variance = var.value();
    return out;
}

TiltedState assemble(double lambda, std::vector<TiltedComponent> comps) {
    numeric::CompensatedSum bn, vb;
    for (const auto& c : comps) {
        bn.add(static_cast<double>(c.multiplicity) * c.mean);
        vb.add(static_cast<double>(c.multiplicity) * c.variance);
    }
    return {lambda, std::move(comps), bn.value(), vb.value()};
}

}  // namespace

TiltedState tilt(const SumModel& model, double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorKind::invalid_parameter, "tilt: lambda must be >= 0");
    std::vector<TiltedComponent> comps;
    for (const auto& c : model.components()) {
        auto tc = tilt_atoms(c.dist.atoms(), c.multiplicity, lambda);
        // The atom-weighted sums above lose relative accuracy for tiny lambda;
        // the centred forms on the original law do not.
        tc.mean = c.dist.tilted_mean(lambda);
        tc.variance = c.dist.tilted_variance(lambda);
        comps.push_back(std::move(tc));
    }
    return assemble(lambda, std::move(comps));
}

TiltedState tilt(const TiltedState& state, double lambda) {
    std::vector<TiltedComponent> comps;
    for (const auto& c : state.components) comps.push_back(tilt_atoms(c.atoms, c.multiplicity, lambda));
    return assemble(state.lambda + lambda, std::move(comps));
}

double tilted_variance_mgf_ratio(const SumModel& model, double lambda) {
    numeric::CompensatedSum s;
    for (const auto& c : model.components()) {
        const double b = c.dist.tilted_mean(lambda);
        s.add(static_cast<double>(c.multiplicity) * (c.dist.tilted_raw_moment(lambda, 2) - b * b));
    }
    return s.value();
}

const char* to_string(LemmaStatus status) {
    switch (status) {
        case LemmaStatus::holds: return "holds";
        case LemmaStatus::violated: return "violated";
        case LemmaStatus::skipped: return "skipped";
    }
    return "unknown";
}

bool LemmaSuiteReport::all_hold() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const LemmaCheck& c) { return c.status == LemmaStatus::violated; });
}

const LemmaCheck* LemmaSuiteReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

struct GridPoint {
    double lambda;
    double psi;
    double Bn;
    double var_bar;
};

// log Be(lambda, t) = log( t/(1+t) e^lambda + 1/(1+t) e^{-lambda t} ).
double log_bennett_mgf(double lambda, double t) {
    return numeric::log_add_exp(std::log(t / (1.0 + t)) + lambda, -std::log1p(t) - lambda * t);
}

class SuiteBuilder {
public:
    SuiteBuilder(const SumModel& model, const std::vector<GridPoint>& grid)
        : model_(model), grid_(grid) {}

    // Sum-level inequality lhs <= rhs, margin in units of sigma^2.
    void sum_check(const std::string& name, bool applicable, const std::string& hypothesis,
                   const std::function<std::pair<double, double>(const GridPoint&)>& sides) {
        LemmaCheck c{name, LemmaStatus::holds, std::numeric_limits<double>::infinity(), 0.0, ""};
        if (!applicable) {
            skip(c, hypothesis);
            return;
        }
        const double s2 = model_.sigma2();
        for (const auto& g : grid_) {
            const auto [lhs, rhs] = sides(g);
            record(c, g.lambda, lhs, rhs, s2);
        }
        finish(c);
    }

    // Per-summand inequality log lhs <= log rhs, margin per unit sigma_i^2.
    void component_check(const std::string& name, bool applicable, const std::string& hypothesis,
                         const std::function<std::pair<double, double>(const DiscreteDistribution&,
                                                                       double)>& sides) {
        LemmaCheck c{name, LemmaStatus::holds, std::numeric_limits<double>::infinity(), 0.0, ""};
        if (!applicable) {
            skip(c, hypothesis);
            return;
        }
        for (const auto& g : grid_)
            for (const auto& comp : model_.components()) {
                const auto [lhs, rhs] = sides(comp.dist, g.lambda);
                record(c, g.lambda, lhs, rhs, comp.dist.variance());
            }
        finish(c);
    }

    LemmaSuiteReport take() { return std::move(report_); }

private:
    static void record(LemmaCheck& c, double lambda, double lhs, double rhs, double scale) {
        const double slack = rhs - lhs;
        const double margin = slack / scale;
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst_lambda = lambda;
        }
        const double tol = 1e-12 * std::max({std::abs(lhs), std::abs(rhs), scale});
        if (slack < -tol) c.status = LemmaStatus::violated;
    }

    void skip(LemmaCheck& c, const std::string& hypothesis) {
        c.status = LemmaStatus::skipped;
        c.worst_margin = 0.0;
        c.note = "hypothesis not met: " + hypothesis;
        report_.checks.push_back(std::move(c));
    }

    void finish(LemmaCheck& c) {
        if (grid_.empty()) c.worst_margin = 0.0;
        report_.checks.push_back(std::move(c));
    }

    const SumModel& model_;
    const std::vector<GridPoint>& grid_;
    LemmaSuiteReport report_;
};

}  // namespace

LemmaSuiteReport verify_lemma_suite(const SumModel& model, double B, double delta,
                                    const std::vector<double>& lambda_grid) {
    if (!(B > 0.0)) throw Error(ErrorKind::invalid_parameter, "B must be > 0");
    std::vector<GridPoint> grid;
    for (double lambda : lambda_grid) {
        if (!(lambda >= 0.0)) throw Error(ErrorKind::invalid_parameter, "lambda grid must be >= 0");
        grid.push_back({lambda, cumulant(model, lambda), cumulant_deriv(model, lambda),
                        cumulant_second_deriv(model, lambda)});
    }

    const double slack = 1.0 + 1e-12;
    const auto prof = moment_profile(model, delta);
    const bool below_one = model.a_max() <= slack;
    const bool below_B = model.a_max() <= B * slack;
    const bool moment_B = prof.B_abs <= B * slack;
    const bool cond_A = condition_A_holds(model, B, delta);
    const bool ratio_B = prof.B_ratio <= B * slack;
    const bool abs_one = model.abs_max() <= slack;
    bool sub_gaussian = true;
    for (const auto& c : model.components())
        sub_gaussian = sub_gaussian && c.dist.upper() <= std::sqrt(c.dist.variance()) * slack;

    const double s2 = model.sigma2();
    const double n = static_cast<double>(model.n());
    SuiteBuilder sb(model, grid);

    sb.component_check("lemma_3_1", below_one, "xi_i <= 1",
                       [](const DiscreteDistribution& d, double l) {
                           return std::pair{d.log_mgf(l), log_bennett_mgf(l, d.variance())};
                       });
    sb.component_check("lemma_3_2", below_B && moment_B, "xi_i <= B and E|xi_i|^{2+delta} <= B^{2+delta}",
                       [B](const DiscreteDistribution& d, double l) {
                           return std::pair{d.log_mgf(l), 0.5 * B * B * l * l};
                       });
    sb.sum_check("lemma_3_3_upper", below_B, "xi_i <= B", [B, s2](const GridPoint& g) {
        return std::pair{g.Bn, std::expm1(B * g.lambda) / B * s2};
    });
    sb.sum_check("lemma_3_3_lower", below_B && cond_A, "xi_i <= B and condition (A)",
                 [B, s2](const GridPoint& g) {
                     const double l = g.lambda;
                     return std::pair{(1.0 - 0.5 * B * l) * l * s2 * std::exp(-0.5 * B * B * l * l), g.Bn};
                 });
    sb.sum_check("lemma_3_4", below_one, "xi_i <= 1", [n, s2](const GridPoint& g) {
        const double t = s2 / n;
        return std::pair{g.psi, n * log_bennett_mgf(g.lambda, t)};
    });
    sb.sum_check("lemma_3_5_lower", below_B && cond_A, "xi_i <= B and condition (A)",
                 [B, s2](const GridPoint& g) {
                     return std::pair{std::max(0.0, 1.0 - 2.0 * B * g.lambda) * s2, g.var_bar};
                 });
    sb.sum_check("lemma_3_5_upper", below_B && cond_A, "xi_i <= B and condition (A)",
                 [B, s2](const GridPoint& g) {
                     return std::pair{g.var_bar, std::exp(B * g.lambda) * s2};
                 });
    sb.sum_check("lemma_5_1", sub_gaussian, "xi_i <= sigma_i", [s2](const GridPoint& g) {
        return std::pair{g.psi, 0.5 * g.lambda * g.lambda * s2};
    });
    sb.sum_check("lemma_5_2", below_B && ratio_B, "xi_i <= B and E|xi_i|^3 <= B E xi_i^2",
                 [B, s2](const GridPoint& g) {
                     const double l = g.lambda;
                     return std::pair{std::max(0.0, 1.0 - B * l) * std::exp(-B * B * l * l) * s2, g.var_bar};
                 });
    sb.sum_check("lemma_6_2", abs_one, "|xi_i| <= 1", [s2](const GridPoint& g) {
        const double l = g.lambda;
        return std::pair{-std::expm1(-l) * std::exp(-0.5 * l * l) * s2, g.Bn};
    });
    return sb.take();
}

BerryEsseenReport berry_esseen_tilted(const SumModel& model, double lambda, double delta,
                                      double C, double B) {
    if (!(lambda >= 0.0)) throw Error(ErrorKind::invalid_parameter, "lambda must be >= 0");
    if (B <= 0.0) B = model.a_max();
    const auto lattice = convolve_model(model, lambda);
    const double Bn = cumulant_deriv(model, lambda);
    const double sigma_bar = std::sqrt(cumulant_second_deriv(model, lambda));

    double sup = 0.0;
    long double F = 0.0L;
    for (std::size_t j = 0; j < lattice.size(); ++j) {
        const double z = (lattice.value(j) - Bn) / sigma_bar;
        const double phi = normal_cdf(z);
        sup = std::max(sup, static_cast<double>(std::abs(F - phi)));
        F += lattice.masses[j];
        sup = std::max(sup, static_cast<double>(std::abs(F - phi)));
    }

    const auto prof = moment_profile(model, delta);
    BerryEsseenReport out{};
    out.lambda = lambda;
    out.sigma_bar = sigma_bar;
    out.sup_distance = sup;
    out.bound_general = std::pow(2.0, 2.0 + delta) * C * std::exp(B * lambda) * prof.abs_moment_sum /
                        std::pow(sigma_bar, 2.0 + delta);
    out.bound_two_sided = 1.12 / sigma_bar;
    out.two_sided_applicable = model.abs_max() <= 1.0 + 1e-12;
    out.holds = sup <= out.bound_general && (!out.two_sided_applicable || sup <= out.bound_two_sided);
    return out;
}

}  // namespace tailbound
