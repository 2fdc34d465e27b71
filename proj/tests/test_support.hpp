#pragma once

// Helpers shared by the unit tests and the acceptance suite: a seeded random
// generator of bounded mean-zero lattice models and a brute-force enumerator
// used as an independent oracle for small sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "tailbound/dist_model.hpp"

namespace testing_support {

using tailbound::Atom;
using tailbound::Component;
using tailbound::DiscreteDistribution;
using tailbound::SumModel;

// 2..max_atoms distinct values k/den in [-1, 1], at least one on each side of
// zero; positive-side probabilities are rescaled so the mean is exactly zero
// up to rounding.
inline DiscreteDistribution random_distribution(std::mt19937_64& rng, int max_atoms = 6, int den = 20,
                                                double lo = -1.0, double hi = 1.0) {
    const int k_lo = static_cast<int>(std::ceil(lo * den));
    const int k_hi = static_cast<int>(std::floor(hi * den));
    std::uniform_int_distribution<int> n_atoms(2, max_atoms);
    std::uniform_int_distribution<int> neg(k_lo, -1), pos(1, k_hi), any(k_lo, k_hi);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    const int count = n_atoms(rng);
    std::vector<int> ks{neg(rng), pos(rng)};
    while (static_cast<int>(ks.size()) < count) {
        const int k = any(rng);
        if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
    }
    std::vector<double> w;
    double P = 0.0, N = 0.0;
    for (int k : ks) {
        w.push_back(weight(rng));
        const double v = static_cast<double>(k) / den;
        (v > 0 ? P : N) += w.back() * std::abs(v);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] > 0) w[i] *= N / P;
        total += w[i];
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < ks.size(); ++i)
        atoms.push_back({static_cast<double>(ks[i]) / den, w[i] / total});
    // Absorb the leftover rounding in the mean into the largest-magnitude atom.
    double mean = 0.0;
    for (const auto& a : atoms) mean += a.value * a.prob;
    auto& far = *std::max_element(atoms.begin(), atoms.end(),
                                  [](const Atom& a, const Atom& b) { return std::abs(a.value) < std::abs(b.value); });
    far.prob -= mean / far.value;
    return DiscreteDistribution(std::move(atoms));
}

// 1..3 components with multiplicities summing to a random n in [n_lo, n_hi].
inline SumModel random_model(std::mt19937_64& rng, std::int64_t n_lo, std::int64_t n_hi, int max_atoms = 6,
                             int den = 20) {
    std::uniform_int_distribution<std::int64_t> n_dist(n_lo, n_hi);
    std::uniform_int_distribution<int> n_comp(1, 3);
    const std::int64_t n = n_dist(rng);
    const int comps = static_cast<int>(std::min<std::int64_t>(n_comp(rng), n));
    std::vector<Component> out;
    std::int64_t left = n;
    for (int c = 0; c < comps; ++c) {
        std::int64_t m = left;
        if (c + 1 < comps) {
            std::uniform_int_distribution<std::int64_t> share(1, left - (comps - c - 1));
            m = share(rng);
        }
        left -= m;
        out.push_back({random_distribution(rng, max_atoms, den), m});
    }
    return SumModel(std::move(out));
}

// Full distribution of S_n by enumerating every outcome vector (small n only).
// Keys are sums rounded to 1e-9 so that equal lattice sums merge.
inline std::map<long long, double> enumerate_sum(const SumModel& model) {
    std::vector<const DiscreteDistribution*> laws;
    for (const auto& c : model.components())
        for (std::int64_t r = 0; r < c.multiplicity; ++r) laws.push_back(&c.dist);
    std::map<long long, double> out;
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t i, double s, double p) {
        if (i == laws.size()) {
            out[std::llround(s * 1e9)] += p;
            return;
        }
        for (const auto& a : laws[i]->atoms()) rec(i + 1, s + a.value, p * a.prob);
    };
    rec(0, 0.0, 1.0);
    return out;
}

inline double enumerated_tail(const std::map<long long, double>& dist, double threshold, bool strict) {
    const long long t = std::llround(threshold * 1e9);
    double p = 0.0;
    for (const auto& [k, m] : dist)
        if (strict ? k > t : k >= t) p += m;
    return p;
}

}  // namespace testing_support
