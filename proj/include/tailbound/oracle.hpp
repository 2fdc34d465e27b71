#pragma once

// Ground truth for the bounds: exact lattice tails, plain and exponentially
// tilted Monte Carlo, and the log-concave hull behind the Bentkus bound.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tailbound/dist_model.hpp"
#include "tailbound/lattice.hpp"

namespace tailbound {

enum class TailMethod { exact, mc, tilted_mc };

std::string_view to_string(TailMethod method);

struct TailEstimate {
    double p = 0.0;
    /// Zero iff the method is exact.
    double stderr_ = 0.0;
    TailMethod method = TailMethod::exact;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    /// Tilt used by the tilted estimator, 0 otherwise.
    double lambda_bar = 0.0;
    /// Number of samples that landed in the tail event.
    std::int64_t hits = 0;
    /// Reported |sum of lattice masses - 1| for exact results.
    double mass_drift = 0.0;
};

TailEstimate exact_tail(const SumModel& model, double threshold, bool strict);

/// Counter-based generator: the draw stream of sample s under seed k is a
/// pure function of (k, s), so samples can be split across threads freely.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double next_double();

private:
    std::uint64_t state_;
};

TailEstimate mc_tail(const SumModel& model, double threshold, bool strict, std::int64_t n_samples,
                     std::uint64_t seed);

/// Samples S_n under the conjugate measure at the saddlepoint of
/// x = threshold / sigma and averages e^{-lambda S_n + Psi_n(lambda)} 1{tail}.
TailEstimate tilted_mc_tail(const SumModel& model, double threshold, bool strict,
                            std::int64_t n_samples, std::uint64_t seed);

/// Pointwise-smallest log-concave sequence dominating `tail`: the upper
/// concave majorant of log(tail) over consecutive integer positions.
std::vector<double> log_concave_hull(std::span<const double> tail);

struct BentkusResult {
    /// (e^2/2) P°(sum eta_i >= x sigma), not capped.
    double value;
    /// min(1, value).
    double capped;
    /// P°(sum eta_i >= x sigma), log-linearly interpolated between lattice points.
    double hull_probability;
    /// sigma^2/n as used to build the eta law.
    double v_used;
    /// True when sigma^2/n had to be rounded to a rational with denominator 1e6.
    bool v_rounded;
};

/// The eta-sum tail and its log-concave hull, built once per model so that
/// x sweeps do not repeat the convolution. Requires xi_i <= 1.
class BentkusEnvelope {
public:
    explicit BentkusEnvelope(const SumModel& model);
    BentkusResult at(double x) const;

private:
    double sigma_;
    double v_used_;
    bool v_rounded_;
    LatticeDistribution lattice_;
    std::vector<double> hull_;
};

/// Requires xi_i <= 1.
BentkusResult bentkus_bound(const SumModel& model, double x);

}  // namespace tailbound
