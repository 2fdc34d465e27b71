// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds and grids are fixed; nothing here is tuned to
// the implementation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tailbound/classical_bounds.hpp"
#include "tailbound/cli.hpp"
#include "tailbound/dist_model.hpp"
#include "tailbound/error.hpp"
#include "tailbound/lattice.hpp"
#include "tailbound/oracle.hpp"
#include "tailbound/rate_function.hpp"
#include "tailbound/sharp_bounds.hpp"
#include "tailbound/tilted_measure.hpp"
#include "test_support.hpp"

using namespace tailbound;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Points a, a+h, ..., with `count` points; the right end is included only
// when `closed` is set.
std::vector<double> grid(double a, double b, int count, bool closed = true) {
    std::vector<double> out;
    const double h = (b - a) / (closed ? count - 1 : count);
    for (int k = 0; k < count; ++k) out.push_back(a + h * k);
    return out;
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Criteria 1 and 2 share the eta-model grids.
struct EtaCase {
    double v;
    std::int64_t n;
};

std::vector<EtaCase> eta_cases() {
    std::vector<EtaCase> out;
    for (double v : {0.1, 0.25, 1.0, 4.0})
        for (std::int64_t n : {10, 100, 1000}) out.push_back({v, n});
    return out;
}

Outcome hoeffding_sharpness() {
    const auto start = Clock::now();
    double worst = 0.0;
    int points = 0;
    for (const auto& c : eta_cases()) {
        const auto m = eta_model(c.v, c.n);
        const double sigma = m.sigma();
        for (double x : grid(0.0, static_cast<double>(c.n) / sigma, 50, false)) {
            const double dlog = log_inf_mgf(m, x) - log_hoeffding_bound(x, sigma, c.n);
            worst = std::max(worst, std::abs(std::expm1(dlog)));
            ++points;
        }
    }
    const double t = seconds_since(start);
    return {worst <= 1e-9 && t < 5.0, fmt("%d points, max rel err %.3g, %.2f s", points, worst, t)};
}

Outcome ordering_chain() {
    const double slack = std::log1p(1e-14);
    int violations = 0, points = 0;
    for (const auto& c : eta_cases()) {
        const auto m = eta_model(c.v, c.n);
        const double sigma = m.sigma();
        for (double x : grid(0.0, static_cast<double>(c.n) / sigma, 50, false)) {
            const double lh = log_hoeffding_bound(x, sigma, c.n);
            const double xc = x_check(x, sigma);
            if (lh > log_bennett_bound(x, sigma) + slack) ++violations;
            if (lh > -0.5 * xc * xc + slack) ++violations;
            ++points;
        }
    }
    return {violations == 0, fmt("%d points, %d violations", points, violations)};
}

Outcome mills_sandwich() {
    int violations = 0;
    for (double x : grid(0.0, 100.0, 10000)) {
        const double th = mills_ratio(x);
        const double lo = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * (1.0 + x));
        const double hi = 1.0 / (std::sqrt(std::numbers::pi) * (1.0 + x));
        if (th < lo || th > hi) ++violations;
    }
    const double d0 = std::abs(mills_ratio(0.0) - 0.5);
    return {violations == 0 && d0 <= 1e-15,
            fmt("10000 points, %d violations, |Theta(0) - 0.5| = %.2g", violations, d0)};
}

Outcome theorem23_containment() {
    const auto start = Clock::now();
    int violations = 0, checked = 0;
    for (std::int64_t n : {100, 400, 2500, 10000}) {
        const auto m = rademacher_model(n);
        const ExactSum exact(m);
        const double sigma = m.sigma();
        for (double x : grid(0.0, 0.606 * sigma, 100)) {
            const double tail = exact.tail(x * sigma, true);
            if (tail < 1e-12) continue;
            const auto s = theorem23_interval(m, x);
            const double tol = 1e-12 * tail;
            if (!s.valid || tail < s.lower - tol || tail > s.upper + tol) ++violations;
            ++checked;
        }
    }
    const double t = seconds_since(start);
    return {violations == 0 && t < 60.0, fmt("%d points, %d violations, %.2f s", checked, violations, t)};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Outcome figure1() {
    const std::vector<std::int64_t> ns{100, 400, 2500, 10000};
    const auto a = cli::cmd_figure1(ns, 0.0, 100);
    const auto b = cli::cmd_figure1(ns, 0.0, 100);
    if (a.exit_code != 0) return {false, "figure1 exited with " + std::to_string(a.exit_code)};
    const bool deterministic = a.output == b.output;

    std::istringstream in(a.output);
    std::string line;
    std::vector<std::string> header;
    std::vector<double> max_dev(ns.size(), 0.0);
    int band_violations = 0, rows = 0;
    bool finite = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (header.empty()) {
            header = cells;
            continue;
        }
        auto col = [&](const std::string& name) {
            const auto it = std::find(header.begin(), header.end(), name);
            const auto& cell = cells.at(static_cast<std::size_t>(it - header.begin()));
            return cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell);
        };
        const auto n = static_cast<std::int64_t>(col("n"));
        const double dev = std::abs(col("ratio") - 1.0);
        if (!std::isfinite(dev)) finite = false;
        const auto idx = static_cast<std::size_t>(std::find(ns.begin(), ns.end(), n) - ns.begin());
        max_dev.at(idx) = std::max(max_dev[idx], dev);
        if (n == 10000) {
            const double band = col("band");
            if (!(dev <= band)) ++band_violations;
        }
        ++rows;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < ns.size(); ++i) decreasing = decreasing && max_dev[i] < max_dev[i - 1];
    return {finite && decreasing && band_violations == 0 && deterministic,
            fmt("%d rows; max|R-1| = %.4g, %.4g, %.4g, %.4g; n=1e4 band violations %d; deterministic %s", rows,
                max_dev[0], max_dev[1], max_dev[2], max_dev[3], band_violations, deterministic ? "yes" : "no")};
}

Outcome constant_caps() {
    double max23 = 0.0, max22 = 0.0;
    // x/sigma on [0, 0.1] for Theorem 2.3; x B / sigma on [0, 0.1] for Theorem 2.2
    // with sigma = B = 1.
    for (double r : grid(0.0, 0.1, 10000)) {
        max23 = std::max(max23, theorem23_cx(r, 1.0));
        max22 = std::max(max22, theorem22_cx(r, 1.0, 1.0, 0.56));
    }
    const double scaled22 = std::sqrt(2.0 * std::numbers::pi) * max22;
    return {max23 <= 3.08 && scaled22 <= 32.47,
            fmt("max c_x (Thm 2.3) = %.10g <= 3.08: %s; max sqrt(2pi) c_x (Thm 2.2) = %.6g <= 32.47: %s "
                "(displayed c_x alone peaks at %.10g)",
                max23, max23 <= 3.08 ? "yes" : "no", scaled22, scaled22 <= 32.47 ? "yes" : "no", max22)};
}

Outcome lemma_suite() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    int violations = 0, held = 0, skipped = 0;
    std::string first;
    for (int i = 0; i < 1000; ++i) {
        const auto m = testing_support::random_model(rng, 50, 500, 6);
        const double B = moment_profile(m, 1.0).B_ratio;
        const auto lambdas = grid(0.0, 1.0 / std::max(B, m.a_max()), 50);
        const auto r = verify_lemma_suite(m, B, 1.0, lambdas);
        for (const auto& c : r.checks) {
            if (c.status == LemmaStatus::violated) {
                ++violations;
                if (first.empty()) first = fmt("; first: model %d %s margin %.3g", i, c.name.c_str(), c.worst_margin);
            } else if (c.status == LemmaStatus::skipped) {
                ++skipped;
            } else {
                ++held;
            }
        }
    }
    const double t = seconds_since(start);
    return {violations == 0 && t < 120.0,
            fmt("1000 models, %d checks held, %d skipped by hypothesis, %d violated, %.1f s", held, skipped,
                violations, t) +
                first};
}

Outcome berry_esseen() {
    int violations = 0;
    double worst = 0.0;
    for (std::int64_t n : {100, 400, 1600})
        for (double l : {0.0, 0.05, 0.1}) {
            const auto r = berry_esseen_tilted(rademacher_model(n), l, 1.0, 0.56);
            worst = std::max(worst, r.sup_distance * r.sigma_bar);
            if (!(r.sup_distance <= 1.12 / r.sigma_bar)) ++violations;
        }
    return {violations == 0, fmt("9 cases, %d violations, max sigma_bar * sup = %.4f", violations, worst)};
}

struct Sweep {
    int checked = 0, violations = 0, skipped = 0;
    std::string first;
};

// Counts tails outside [lower, upper] across `xs`; hypothesis violations mark
// the whole model skipped for that result.
void sweep(Sweep& s, const std::string& label, const ExactSum& exact, double sigma, const std::vector<double>& xs,
           const std::function<std::pair<double, double>(double)>& bounds) {
    try {
        for (double x : xs) {
            const auto [lo, hi] = bounds(x);
            const double tail = exact.tail(x * sigma, true);
            const double tol = 1e-9 * std::max(tail, 1e-300);
            if (tail < lo - tol || tail > hi + tol) {
                ++s.violations;
                if (s.first.empty()) s.first = fmt("%s x=%.6g tail %.6g not in [%.6g, %.6g]", label.c_str(), x, tail, lo, hi);
            }
            ++s.checked;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::hypothesis_violation) throw;
        ++s.skipped;
    }
}

Outcome theorem_containment() {
    std::mt19937_64 rng(4242);
    std::vector<std::pair<std::string, SumModel>> models;
    models.emplace_back("rademacher-10000", rademacher_model(10000));
    for (int i = 0; i < 20; ++i) models.emplace_back("random-" + std::to_string(i), testing_support::random_model(rng, 50, 500));

    Sweep t21, t31, c22, c23;
    const double C = 0.56;
    for (const auto& [name, m] : models) {
        const ExactSum exact(m);
        const double sigma = m.sigma();
        const auto prof = moment_profile(m, 1.0);
        // Theorem 2.1 needs condition (A) and B >= ess sup |xi_i|; the larger
        // of the two moment constants satisfies both.
        const double B21 = std::max(prof.B_ratio, prof.B_abs);
        sweep(t21, name + " thm2.1", exact, sigma, grid(0.0, 0.25 * sigma / B21, 50, false), [&](double x) {
            const auto s = theorem21_interval(m, x, B21, 1.0, C);
            return std::pair{s.lower, s.upper};
        });
        sweep(t31, name + " thm3.1", exact, sigma, grid(0.0, m.sum_upper() / sigma, 50, false), [&](double x) {
            const auto s = theorem31_interval(m, x, 1.0, C);
            return std::pair{s.lower, s.upper};
        });
        const double B = prof.B_ratio;
        sweep(c22, name + " cor2.2", exact, sigma, grid(0.0, 0.1 * sigma / B, 50), [&](double x) {
            const auto s = corollary22_interval(m, x, B);
            return std::pair{s.lower, s.upper};
        });
        sweep(c23, name + " cor2.3", exact, sigma, grid(0.0, 0.1 * sigma / B, 50),
              [&](double x) { return std::pair{0.0, corollary23_upper(m, x, B)}; });
    }
    const int violations = t21.violations + t31.violations + c22.violations + c23.violations;
    std::string first = t21.first + t31.first + c22.first + c23.first;
    return {violations == 0,
            fmt("21 models; checked/violations/skipped: thm2.1 %d/%d/%d, thm3.1 %d/%d/%d, cor2.2 %d/%d/%d, "
                "cor2.3 %d/%d/%d",
                t21.checked, t21.violations, t21.skipped, t31.checked, t31.violations, t31.skipped, c22.checked,
                c22.violations, c22.skipped, c23.checked, c23.violations, c23.skipped) +
                (first.empty() ? "" : "; first: " + first)};
}

Outcome importance_sampling() {
    const auto start = Clock::now();
    const auto m = rademacher_model(400);
    bool ok = true;
    std::string detail;
    for (double x : {2.0, 3.0, 4.0}) {
        const double thr = x * m.sigma();
        const auto t = tilted_mc_tail(m, thr, true, 100000, 2024);
        const double exact = exact_tail(m, thr, true).p;
        const double z = std::abs(t.p - exact) / t.stderr_;
        const double rel = t.stderr_ / t.p;
        ok = ok && z <= 4.0 && rel <= 0.01;
        detail += fmt("x=%g |est-exact|/stderr %.2f rel stderr %.4f; ", x, z, rel);
    }
    const auto plain = mc_tail(m, 4.0 * m.sigma(), true, 100000, 2024);
    const bool few = plain.hits <= 10;
    const double t = seconds_since(start);
    ok = ok && few && t < 30.0;
    return {ok, detail + fmt("plain MC hits at x=4: %lld; %.2f s", static_cast<long long>(plain.hits), t)};
}

Outcome bentkus_hull() {
    const auto m = rademacher_model(100);
    const BentkusEnvelope env(m);
    const ExactSum exact(m);
    int violations = 0;
    for (double x : grid(0.0, 3.0, 301))
        if (env.at(x).value < exact.tail(x * m.sigma(), false)) ++violations;

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 80);
    int hull_failures = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> t(len(rng));
        for (auto& v : t) v = u(rng);
        std::sort(t.rbegin(), t.rend());
        const auto h = log_concave_hull(t);
        const auto hh = log_concave_hull(h);
        bool good = true;
        for (std::size_t k = 0; k < t.size(); ++k) {
            good = good && h[k] >= t[k];
            good = good && std::abs(hh[k] - h[k]) <= 1e-12 * h[k];
        }
        if (!good) ++hull_failures;
    }
    return {violations == 0 && hull_failures == 0,
            fmt("301 points, %d domination violations; hull failures on 100 sequences: %d", violations, hull_failures)};
}

void run(int id, const std::string& title, Outcome (*fn)()) {
    try {
        report(id, title, fn());
    } catch (const std::exception& e) {
        report(id, title, {false, std::string("exception: ") + e.what()});
    }
}

}  // namespace

int main() {
    run(1, "Hoeffding sharpness on eta models", hoeffding_sharpness);
    run(2, "Hoeffding <= Bennett and exp(-xcheck^2/2)", ordering_chain);
    run(3, "Mills ratio sandwich", mills_sandwich);
    run(4, "Theorem 2.3 containment, Rademacher", theorem23_containment);
    run(5, "Figure 1 ratio", figure1);
    run(6, "constant caps", constant_caps);
    run(7, "lemma suite on random models", lemma_suite);
    run(8, "Berry-Esseen under tilt", berry_esseen);
    run(9, "Theorems 2.1/3.1, Corollaries 2.2/2.3 containment", theorem_containment);
    run(10, "importance sampling", importance_sampling);
    run(11, "Bentkus bound and log-concave hull", bentkus_hull);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
