#include "tailbound/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tailbound/error.hpp"

namespace tailbound {

namespace {

constexpr std::int64_t kMaxDenominator = 1'000'000;
constexpr std::int64_t kMaxCommonDenominator = 1'000'000'000'000;

}  // namespace

std::optional<Rational> rationalize(double value, std::int64_t max_den) {
    if (!std::isfinite(value)) return std::nullopt;
    const double x = std::abs(value);
    // A few ulps: decimal inputs like 0.35 land within one ulp of k/20, while a
    // looser tolerance would let almost any double through at denominators up to 1e6.
    const double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x);
    const std::int64_t sign = value < 0.0 ? -1 : 1;
    if (x > 1e15) return std::nullopt;

    // Convergents h/k of the continued fraction of x.
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        if (r > 1e15) break;
        const double a_d = std::floor(r);
        const auto a = static_cast<std::int64_t>(a_d);
        const std::int64_t h2 = a * h1 + h0;
        const std::int64_t k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol)
            return Rational{sign * h1, k1};
        const double frac = r - a_d;
        if (frac <= 0.0) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

double LatticeDistribution::index_of(double threshold) const {
    const double r = (threshold * static_cast<double>(denominator) - static_cast<double>(offset)) /
                     static_cast<double>(step);
    const double k = std::round(r);
    if (std::abs(r - k) <= 1e-9 + 1e-12 * std::abs(r)) return k;
    return r;
}

LatticeDistribution convolve_model(const SumModel& model, double lambda, std::size_t max_points) {
    // Common denominator of all atom values.
    std::int64_t q = 1;
    std::vector<std::vector<Rational>> rationals;
    for (const auto& c : model.components()) {
        auto& row = rationals.emplace_back();
        for (const auto& a : c.dist.atoms()) {
            auto r = rationalize(a.value, kMaxDenominator);
            if (!r)
                throw Error(ErrorKind::unsupported,
                            "atom value is not a rational with denominator <= 1e6");
            row.push_back(*r);
            q = std::lcm(q, r->den);
            if (q > kMaxCommonDenominator)
                throw Error(ErrorKind::unsupported, "common lattice denominator too large");
        }
    }

    // Integer positions per component relative to the component minimum,
    // reduced by the gcd of all gaps.
    std::int64_t offset = 0;
    std::int64_t g = 0;
    std::vector<std::vector<std::int64_t>> shifts;
    const auto comps = model.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        auto& sh = shifts.emplace_back();
        std::int64_t kmin = 0;
        for (std::size_t k = 0; k < rationals[i].size(); ++k) {
            const auto& r = rationals[i][k];
            const std::int64_t num = r.num * (q / r.den);
            if (k == 0 || num < kmin) kmin = num;
            sh.push_back(num);
        }
        for (auto& s : sh) {
            s -= kmin;
            g = std::gcd(g, s);
        }
        offset += comps[i].multiplicity * kmin;
    }
    if (g == 0) g = 1;

    std::size_t total = 1;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (auto& s : shifts[i]) s /= g;
        const auto span = static_cast<std::size_t>(*std::max_element(shifts[i].begin(), shifts[i].end()));
        const double grow = static_cast<double>(span) * static_cast<double>(comps[i].multiplicity);
        if (static_cast<double>(total) + grow > static_cast<double>(max_points))
            throw Error(ErrorKind::unsupported, "lattice exceeds the point budget");
        total += span * static_cast<std::size_t>(comps[i].multiplicity);
    }

    LatticeDistribution out;
    out.denominator = q;
    out.offset = offset;
    out.step = g;
    std::vector<long double> cur(total, 0.0L), next(total, 0.0L);
    cur[0] = 1.0L;
    std::size_t used = 1;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto atoms = comps[i].dist.atoms();
        // Tilted probabilities p_k e^{lambda a_k} / E e^{lambda xi}.
        std::vector<long double> p(atoms.size());
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& a : atoms) m = std::max(m, lambda * a.value);
        long double z = 0.0L;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            p[k] = static_cast<long double>(atoms[k].prob) *
                   std::exp(static_cast<long double>(lambda * atoms[k].value - m));
            z += p[k];
        }
        for (auto& pk : p) pk /= z;
        const auto& sh = shifts[i];
        const auto span = static_cast<std::size_t>(*std::max_element(sh.begin(), sh.end()));
        for (std::int64_t rep = 0; rep < comps[i].multiplicity; ++rep) {
            std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(used + span), 0.0L);
            for (std::size_t k = 0; k < p.size(); ++k) {
                const long double pk = p[k];
                long double* dst = next.data() + sh[k];
                for (std::size_t j = 0; j < used; ++j) dst[j] += pk * cur[j];
            }
            used += span;
            cur.swap(next);
        }
    }
    long double mass = 0.0L;
    for (auto v : cur) mass += v;
    out.mass_drift = static_cast<double>(std::abs(mass - 1.0L));
    out.masses = std::move(cur);
    return out;
}

ExactSum::ExactSum(const SumModel& model, double lambda)
    : lattice_(convolve_model(model, lambda)) {
    build_suffix();
}

ExactSum::ExactSum(LatticeDistribution lattice) : lattice_(std::move(lattice)) { build_suffix(); }

void ExactSum::build_suffix() {
    const auto& m = lattice_.masses;
    suffix_.assign(m.size() + 1, 0.0L);
    for (std::size_t j = m.size(); j-- > 0;) suffix_[j] = suffix_[j + 1] + m[j];
}

double ExactSum::tail(double threshold, bool strict) const {
    const double r = lattice_.index_of(threshold);
    double first;
    if (r == std::floor(r))
        first = strict ? r + 1.0 : r;
    else
        first = std::ceil(r);
    if (first <= 0.0) return 1.0;
    if (first >= static_cast<double>(lattice_.size())) return 0.0;
    const auto j = static_cast<std::size_t>(first);
    return static_cast<double>(std::min(suffix_[j], 1.0L));
}

double ExactSum::cdf(double threshold) const { return 1.0 - tail(threshold, true); }

double ExactSum::mean() const {
    long double s = 0.0L;
    for (std::size_t j = 0; j < lattice_.size(); ++j)
        s += static_cast<long double>(lattice_.value(j)) * lattice_.masses[j];
    return static_cast<double>(s);
}

std::vector<double> ExactSum::tail_sequence() const {
    std::vector<double> out(lattice_.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = static_cast<double>(std::min(suffix_[j], 1.0L));
    return out;
}

}  // namespace tailbound
