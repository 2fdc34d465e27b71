#include "tailbound/dist_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailbound/error.hpp"
#include "tailbound/numeric.hpp"

namespace tailbound {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::invalid_model: return "invalid-model";
        case ErrorKind::no_saddlepoint: return "no-saddlepoint";
        case ErrorKind::out_of_range: return "out-of-range";
        case ErrorKind::hypothesis_violation: return "hypothesis-violation";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::parse_error: return "parse-error";
    }
    return "unknown";
}

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kMeanTol = 1e-12;
// Beyond this |lambda a| the log1p/expm1 forms risk overflow; switch to
// max-shifted sums.
constexpr double kSmallTilt = 30.0;

double max_abs_value(std::span<const Atom> atoms) {
    double m = 0.0;
    for (const auto& a : atoms) m = std::max(m, std::abs(a.value));
    return m;
}

}  // namespace

std::string validate_atoms(std::span<const Atom> atoms) {
    if (atoms.size() < 2) return "at least 2 atoms required";
    numeric::CompensatedSum total, mean;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const auto& a = atoms[k];
        std::ostringstream where;
        where << "atom " << k << ": ";
        if (!std::isfinite(a.value)) return where.str() + "value is not finite";
        if (!std::isfinite(a.prob) || !(a.prob > 0.0))
            return where.str() + "probability must be strictly positive";
        total.add(a.prob);
        mean.add(a.value * a.prob);
    }
    if (std::abs(total.value() - 1.0) > kProbTol) {
        std::ostringstream os;
        os.precision(17);
        os << "probabilities sum to " << total.value() << ", not 1";
        return os.str();
    }
    if (std::abs(mean.value()) > kMeanTol) {
        std::ostringstream os;
        os.precision(17);
        os << "mean is " << mean.value() << ", not 0";
        return os.str();
    }
    // Mean zero with positive probabilities and two atoms already forces
    // lower < 0 < upper unless every value is 0.
    bool nonzero = false;
    for (const auto& a : atoms) nonzero = nonzero || a.value != 0.0;
    if (!nonzero) return "degenerate distribution (all values 0)";
    return {};
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
    if (auto msg = validate_atoms(atoms_); !msg.empty())
        throw Error(ErrorKind::invalid_model, msg);
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    lower_ = atoms_.front().value;
    upper_ = atoms_.back().value;
    numeric::CompensatedSum v;
    for (const auto& a : atoms_) v.add(a.value * a.value * a.prob);
    variance_ = v.value();
}

double DiscreteDistribution::log_mgf(double lambda) const {
    if (lambda == 0.0) return 0.0;
    if (std::abs(lambda) * max_abs_value(atoms_) <= kSmallTilt) {
        // E e^{lambda xi} - 1 = sum p (e^{lambda a} - 1 - lambda a) since the
        // mean is zero; every term is non-negative.
        numeric::CompensatedSum s;
        for (const auto& a : atoms_)
            s.add(a.prob * numeric::expm1_minus_x(lambda * a.value));
        return std::log1p(s.value());
    }
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) m = std::max(m, lambda * a.value);
    numeric::CompensatedSum s;
    for (const auto& a : atoms_) s.add(a.prob * std::exp(lambda * a.value - m));
    return m + std::log(s.value());
}

double DiscreteDistribution::tilted_mean(double lambda) const {
    if (lambda == 0.0) return 0.0;
    if (std::abs(lambda) * max_abs_value(atoms_) <= kSmallTilt) {
        // a (e^{lambda a} - 1) has the sign of lambda for every atom.
        numeric::CompensatedSum num, den;
        for (const auto& a : atoms_) {
            num.add(a.prob * a.value * std::expm1(lambda * a.value));
            den.add(a.prob * numeric::expm1_minus_x(lambda * a.value));
        }
        return num.value() / (1.0 + den.value());
    }
    return tilted_raw_moment(lambda, 1);
}

double DiscreteDistribution::tilted_raw_moment(double lambda, int k) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) m = std::max(m, lambda * a.value);
    numeric::CompensatedSum num, den;
    for (const auto& a : atoms_) {
        const double w = a.prob * std::exp(lambda * a.value - m);
        num.add(w * std::pow(a.value, k));
        den.add(w);
    }
    return num.value() / den.value();
}

double DiscreteDistribution::tilted_variance(double lambda) const {
    if (lambda == 0.0) return variance_;
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) m = std::max(m, lambda * a.value);
    const double b = tilted_mean(lambda);
    numeric::CompensatedSum num, den;
    for (const auto& a : atoms_) {
        const double w = a.prob * std::exp(lambda * a.value - m);
        const double d = a.value - b;
        num.add(w * d * d);
        den.add(w);
    }
    return num.value() / den.value();
}

double abs_moment(const DiscreteDistribution& dist, double p) {
    numeric::CompensatedSum s;
    for (const auto& a : dist.atoms()) s.add(std::pow(std::abs(a.value), p) * a.prob);
    return s.value();
}

DiscreteDistribution hoeffding_eta(double v) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::invalid_parameter, "hoeffding_eta: v must be > 0");
    return DiscreteDistribution({{1.0, v / (1.0 + v)}, {-v, 1.0 / (1.0 + v)}});
}

DiscreteDistribution rademacher() {
    return DiscreteDistribution({{-1.0, 0.5}, {1.0, 0.5}});
}

SumModel::SumModel(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw Error(ErrorKind::invalid_model, "model has no components");
    numeric::CompensatedSum s2, su, sl;
    a_max_ = -std::numeric_limits<double>::infinity();
    a_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& c = components_[i];
        if (c.multiplicity < 1)
            throw Error(ErrorKind::invalid_model,
                        "component " + std::to_string(i) + ": multiplicity must be >= 1");
        n_ += c.multiplicity;
        const double m = static_cast<double>(c.multiplicity);
        s2.add(m * c.dist.variance());
        su.add(m * c.dist.upper());
        sl.add(m * c.dist.lower());
        a_max_ = std::max(a_max_, c.dist.upper());
        a_min_ = std::min(a_min_, c.dist.lower());
    }
    sigma2_ = s2.value();
    sigma_ = std::sqrt(sigma2_);
    sum_upper_ = su.value();
    sum_lower_ = sl.value();
    if (!(sigma2_ > 0.0)) throw Error(ErrorKind::invalid_model, "sigma^2 must be > 0");
}

double SumModel::abs_max() const { return std::max(a_max_, -a_min_); }

SumModel iid_model(const DiscreteDistribution& dist, std::int64_t n) {
    return SumModel({{dist, n}});
}

SumModel rademacher_model(std::int64_t n) { return iid_model(rademacher(), n); }

SumModel eta_model(double v, std::int64_t n) { return iid_model(hoeffding_eta(v), n); }

MomentProfile moment_profile(const SumModel& model, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw Error(ErrorKind::invalid_parameter, "delta must lie in (0, 1]");
    MomentProfile out{delta, 0.0, 0.0, 0.0};
    numeric::CompensatedSum sum;
    const double p = 2.0 + delta;
    for (const auto& c : model.components()) {
        const double m = abs_moment(c.dist, p);
        out.B_abs = std::max(out.B_abs, std::pow(m, 1.0 / p));
        out.B_ratio = std::max(out.B_ratio, abs_moment(c.dist, 3.0) / c.dist.variance());
        sum.add(static_cast<double>(c.multiplicity) * m);
    }
    out.abs_moment_sum = sum.value();
    return out;
}

ConditionAReport check_condition_A(const SumModel& model, double B,
                                   std::span<const double> lambda_grid) {
    if (!(B > 0.0)) throw Error(ErrorKind::invalid_parameter, "B must be > 0");
    ConditionAReport out{true, std::numeric_limits<double>::infinity(), 0.0};
    const double s2 = model.sigma2();
    for (double lambda : lambda_grid) {
        if (lambda < 0.0)
            throw Error(ErrorKind::invalid_parameter, "lambda grid must be >= 0");
        numeric::CompensatedSum lhs;
        for (const auto& c : model.components()) {
            // E xi^2 e^{lambda xi}, shifted by the largest exponent.
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& a : c.dist.atoms()) m = std::max(m, lambda * a.value);
            m = std::max(m, 0.0);
            numeric::CompensatedSum e;
            for (const auto& a : c.dist.atoms())
                e.add(a.prob * a.value * a.value * std::exp(lambda * a.value - m));
            lhs.add(static_cast<double>(c.multiplicity) * e.value() * std::exp(m));
        }
        const double margin = lhs.value() - (1.0 - B * lambda) * s2;
        if (margin < out.worst_margin) {
            out.worst_margin = margin;
            out.worst_lambda = lambda;
        }
    }
    if (lambda_grid.empty()) out.worst_margin = 0.0;
    out.holds = out.worst_margin >= -1e-12 * s2;
    return out;
}

std::vector<double> default_condition_A_grid(double B) {
    std::vector<double> grid{0.0};
    const double lo = std::log(1e-6), hi = std::log(10.0 / B);
    for (int k = 0; k < 200; ++k) grid.push_back(std::exp(lo + (hi - lo) * k / 199.0));
    return grid;
}

bool condition_A_holds(const SumModel& model, double B, double delta) {
    const auto prof = moment_profile(model, delta);
    if (prof.B_abs > B * (1.0 + 1e-12)) return false;
    if (prof.B_ratio <= B * (1.0 + 1e-12)) return true;
    const auto grid = default_condition_A_grid(B);
    return check_condition_A(model, B, grid).holds;
}

}  // namespace tailbound
