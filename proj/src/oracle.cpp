#include "tailbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "tailbound/error.hpp"
#include "tailbound/lattice.hpp"
#include "tailbound/rate_function.hpp"

namespace tailbound {

std::string_view to_string(TailMethod method) {
    switch (method) {
        case TailMethod::exact: return "exact";
        case TailMethod::mc: return "mc";
        case TailMethod::tilted_mc: return "tilted_mc";
    }
    return "unknown";
}

TailEstimate exact_tail(const SumModel& model, double threshold, bool strict) {
    const ExactSum exact(model);
    TailEstimate out;
    out.p = exact.tail(threshold, strict);
    out.method = TailMethod::exact;
    out.mass_drift = exact.lattice().mass_drift;
    return out;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(splitmix64(seed ^ splitmix64(stream * kGolden + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() {
    state_ += kGolden;
    return splitmix64(state_);
}

double CounterRng::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

namespace {

struct BlockSampler {
    std::vector<double> values;
    std::vector<double> cdf;
    std::int64_t multiplicity;
};

std::vector<BlockSampler> make_samplers(const SumModel& model, double lambda) {
    std::vector<BlockSampler> out;
    for (const auto& c : model.components()) {
        const auto atoms = c.dist.atoms();
        BlockSampler b{{}, {}, c.multiplicity};
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& a : atoms) m = std::max(m, lambda * a.value);
        std::vector<double> w;
        double z = 0.0;
        for (const auto& a : atoms) {
            w.push_back(a.prob * std::exp(lambda * a.value - m));
            z += w.back();
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            acc += w[k] / z;
            b.values.push_back(atoms[k].value);
            b.cdf.push_back(acc);
        }
        b.cdf.back() = 1.0;
        out.push_back(std::move(b));
    }
    return out;
}

double draw_sum(const std::vector<BlockSampler>& blocks, CounterRng& rng) {
    double s = 0.0, comp = 0.0;
    for (const auto& b : blocks) {
        for (std::int64_t r = 0; r < b.multiplicity; ++r) {
            const double u = rng.next_double();
            std::size_t k = 0;
            while (u >= b.cdf[k]) ++k;
            // Kahan step; keeps sums of fractional atoms on the lattice.
            const double y = b.values[k] - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
    }
    return s;
}

struct ChunkTotals {
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    std::int64_t hits = 0;
};

// Samples are processed in fixed-size chunks; each chunk's totals depend only
// on (seed, sample indices), and chunks are merged in index order, so the
// result does not depend on the number of threads.
constexpr std::int64_t kChunk = 8192;

template <class Body>
std::vector<ChunkTotals> run_chunks(std::int64_t n_samples, Body body) {
    const std::int64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<ChunkTotals> totals(static_cast<std::size_t>(n_chunks));
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto n_threads = static_cast<std::int64_t>(std::min<std::int64_t>(hw, n_chunks));
    std::vector<std::thread> pool;
    for (std::int64_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::int64_t c = t; c < n_chunks; c += n_threads) {
                const std::int64_t begin = c * kChunk;
                const std::int64_t end = std::min(n_samples, begin + kChunk);
                totals[static_cast<std::size_t>(c)] = body(begin, end);
            }
        });
    }
    for (auto& th : pool) th.join();
    return totals;
}

bool in_tail(double s, double threshold, bool strict) {
    const double tol = 1e-9 * std::max(1.0, std::abs(threshold));
    return strict ? s > threshold + tol : s >= threshold - tol;
}

}  // namespace

TailEstimate mc_tail(const SumModel& model, double threshold, bool strict, std::int64_t n_samples,
                     std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorKind::invalid_parameter, "n_samples must be >= 1");
    const auto blocks = make_samplers(model, 0.0);
    const auto totals = run_chunks(n_samples, [&](std::int64_t begin, std::int64_t end) {
        ChunkTotals t;
        for (std::int64_t s = begin; s < end; ++s) {
            CounterRng rng(seed, static_cast<std::uint64_t>(s));
            if (in_tail(draw_sum(blocks, rng), threshold, strict)) ++t.hits;
        }
        return t;
    });
    TailEstimate out;
    for (const auto& t : totals) out.hits += t.hits;
    out.method = TailMethod::mc;
    out.n_samples = n_samples;
    out.seed = seed;
    out.p = static_cast<double>(out.hits) / static_cast<double>(n_samples);
    out.stderr_ = std::sqrt(out.p * (1.0 - out.p) / static_cast<double>(n_samples));
    return out;
}

TailEstimate tilted_mc_tail(const SumModel& model, double threshold, bool strict,
                            std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorKind::invalid_parameter, "n_samples must be >= 1");
    const double x = std::max(0.0, threshold) / model.sigma();
    const double lambda = solve_lambda_bar(model, x).lambda_bar;
    const double psi = cumulant(model, lambda);
    const auto blocks = make_samplers(model, lambda);
    const auto totals = run_chunks(n_samples, [&](std::int64_t begin, std::int64_t end) {
        ChunkTotals t;
        for (std::int64_t s = begin; s < end; ++s) {
            CounterRng rng(seed, static_cast<std::uint64_t>(s));
            const double sum = draw_sum(blocks, rng);
            if (!in_tail(sum, threshold, strict)) continue;
            const double w = std::exp(-lambda * sum + psi);
            t.sum_w += w;
            t.sum_w2 += w * w;
            ++t.hits;
        }
        return t;
    });
    double sw = 0.0, sw2 = 0.0;
    TailEstimate out;
    for (const auto& t : totals) {
        sw += t.sum_w;
        sw2 += t.sum_w2;
        out.hits += t.hits;
    }
    const double n = static_cast<double>(n_samples);
    out.method = TailMethod::tilted_mc;
    out.n_samples = n_samples;
    out.seed = seed;
    out.lambda_bar = lambda;
    out.p = sw / n;
    const double var = n > 1 ? std::max(0.0, (sw2 - n * out.p * out.p) / (n - 1.0)) : 0.0;
    out.stderr_ = std::sqrt(var / n);
    return out;
}

std::vector<double> log_concave_hull(std::span<const double> tail) {
    std::vector<double> out(tail.begin(), tail.end());
    std::vector<std::size_t> hull;  // indices of upper-hull vertices, increasing
    std::vector<double> logs(tail.size());
    for (std::size_t k = 0; k < tail.size(); ++k) {
        if (!(tail[k] > 0.0)) continue;
        logs[k] = std::log(tail[k]);
        // Pop while the last vertex lies on or below the chord to k.
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (logs[b] - logs[a]) * static_cast<double>(k - a) -
                                 (logs[k] - logs[a]) * static_cast<double>(b - a);
            if (cross > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(k);
    }
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const std::size_t a = hull[h], b = hull[h + 1];
        for (std::size_t k = a + 1; k < b; ++k) {
            const double w = static_cast<double>(k - a) / static_cast<double>(b - a);
            out[k] = std::max(tail[k], std::exp((1.0 - w) * logs[a] + w * logs[b]));
        }
    }
    return out;
}

BentkusEnvelope::BentkusEnvelope(const SumModel& model) : sigma_(model.sigma()), v_rounded_(false) {
    if (model.a_max() > 1.0 + 1e-12)
        throw Error(ErrorKind::hypothesis_violation, "bentkus bound requires xi_i <= 1");
    const double v = model.sigma2() / static_cast<double>(model.n());
    if (rationalize(v)) {
        v_used_ = v;
    } else {
        v_used_ = std::round(v * 1e6) / 1e6;
        v_rounded_ = true;
    }
    const ExactSum eta(eta_model(v_used_, model.n()));
    hull_ = log_concave_hull(eta.tail_sequence());
    lattice_ = eta.lattice();
}

BentkusResult BentkusEnvelope::at(double x) const {
    if (!(x >= 0.0)) throw Error(ErrorKind::invalid_parameter, "x must be >= 0");
    const double r = lattice_.index_of(x * sigma_);
    const double last = static_cast<double>(lattice_.size() - 1);
    double p;
    if (r <= 0.0) {
        p = hull_.front();
    } else if (r > last) {
        p = 0.0;
    } else {
        const auto j = static_cast<std::size_t>(std::floor(r));
        const double w = r - static_cast<double>(j);
        if (w == 0.0)
            p = hull_[j];
        else if (hull_[j + 1] == 0.0)
            p = 0.0;
        else
            p = std::exp((1.0 - w) * std::log(hull_[j]) + w * std::log(hull_[j + 1]));
    }
    BentkusResult out{};
    out.hull_probability = p;
    out.value = std::numbers::e * std::numbers::e / 2.0 * p;
    out.capped = std::min(1.0, out.value);
    out.v_used = v_used_;
    out.v_rounded = v_rounded_;
    return out;
}

BentkusResult bentkus_bound(const SumModel& model, double x) { return BentkusEnvelope(model).at(x); }

}  // namespace tailbound
