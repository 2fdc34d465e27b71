#pragma once

// Exact distribution of S_n on a common rational lattice.

#include <cstdint>
#include <optional>
#include <vector>

#include "tailbound/dist_model.hpp"

namespace tailbound {

struct Rational {
    std::int64_t num;
    std::int64_t den;
};

/// Best rational approximation with denominator <= max_den, accepted only
/// when it reproduces `value` to 1e-12 relative (absolute below 1).
std::optional<Rational> rationalize(double value, std::int64_t max_den = 1'000'000);

/// Point j carries mass masses[j] and sits at (offset + step * j) / denominator.
struct LatticeDistribution {
    std::int64_t denominator = 1;
    std::int64_t offset = 0;
    std::int64_t step = 1;
    std::vector<long double> masses;
    /// |sum masses - 1| after convolution; never renormalised away.
    double mass_drift = 0.0;

    double value(std::size_t j) const {
        return static_cast<double>(offset + step * static_cast<std::int64_t>(j)) /
               static_cast<double>(denominator);
    }
    std::size_t size() const { return masses.size(); }
    /// Position of `threshold` in index units, snapped to an integer when it
    /// is within rounding of a lattice point.
    double index_of(double threshold) const;
};

constexpr std::size_t kMaxLatticePoints = 100'000'000;

/// Exact n-fold convolution of the model, optionally under the conjugate
/// measure with tilt lambda. Throws unsupported when some atom is not a
/// rational with denominator <= 1e6 or the lattice exceeds max_points.
LatticeDistribution convolve_model(const SumModel& model, double lambda = 0.0,
                                   std::size_t max_points = kMaxLatticePoints);

/// Exact tail queries over a convolved model; suffix sums are precomputed.
class ExactSum {
public:
    explicit ExactSum(const SumModel& model, double lambda = 0.0);
    explicit ExactSum(LatticeDistribution lattice);

    /// P(S > threshold) when strict, P(S >= threshold) otherwise.
    double tail(double threshold, bool strict) const;
    /// P(S <= threshold).
    double cdf(double threshold) const;
    /// Sum over the lattice of value * mass.
    double mean() const;

    const LatticeDistribution& lattice() const { return lattice_; }
    /// P(S >= value(j)) for every lattice index.
    std::vector<double> tail_sequence() const;

private:
    void build_suffix();

    LatticeDistribution lattice_;
    std::vector<long double> suffix_;
};

}  // namespace tailbound
