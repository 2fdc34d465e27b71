#include "tailbound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "tailbound/classical_bounds.hpp"
#include "tailbound/error.hpp"
#include "tailbound/lattice.hpp"
#include "tailbound/oracle.hpp"
#include "tailbound/rate_function.hpp"
#include "tailbound/report.hpp"
#include "tailbound/tilted_measure.hpp"

namespace tailbound::cli {

using nlohmann::json;

namespace {

constexpr const char* kCsvTag = "# tailbound-csv v1";

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw Error(ErrorKind::parse_error, what + ": cannot parse \"" + s + "\" as a number");
    return v;
}

// Cells are strings; an empty cell means "not computed".
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const std::string& kind, const Table& t) {
    std::string out = std::string(kCsvTag) + " " + kind + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.columns);
    for (const auto& r : t.rows) line(r);
    return out;
}

const char* bool_cell(bool b) { return b ? "true" : "false"; }
const char* tail_kind(bool strict) { return strict ? "strict" : "nonstrict"; }

json model_summary(const SumModel& model) {
    return {{"n", model.n()},
            {"sigma", model.sigma()},
            {"sigma2", model.sigma2()},
            {"a_max", model.a_max()},
            {"a_min", model.a_min()},
            {"components", model.components().size()}};
}

// Runs body(i) for i in [0, count) on a few threads; results are written by
// index so output order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += n_threads) body(i);
        });
    for (auto& th : pool) th.join();
}

struct CellError {
    ErrorKind kind;
    std::string message;
};

// Evaluates one group for one row; errors become empty cells.
template <class F>
std::optional<CellError> guarded(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return CellError{e.kind(), e.what()};
    }
    return std::nullopt;
}

std::vector<double> linspace(double a, double b, int points) {
    std::vector<double> out;
    if (points <= 1) return {a};
    for (int k = 0; k < points; ++k) out.push_back(a + (b - a) * k / (points - 1));
    out.back() = b;
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.find(',') != std::string::npos) {
        std::vector<double> out;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "grid"));
        return out;
    }
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) return {parse_double(parts[0], "grid")};
    if (parts.size() != 3) throw Error(ErrorKind::parse_error, "grid: expected a:b:steps, got \"" + spec + "\"");
    const double a = parse_double(parts[0], "grid start");
    const double b = parse_double(parts[1], "grid end");
    const double steps = parse_double(parts[2], "grid steps");
    if (!(steps >= 1.0) || steps != std::floor(steps) || steps > 1e7)
        throw Error(ErrorKind::parse_error, "grid: steps must be a positive integer");
    if (!(b >= a)) throw Error(ErrorKind::parse_error, "grid: end must not precede start");
    return linspace(a, b, static_cast<int>(steps));
}

const std::vector<std::string>& bound_groups() {
    static const std::vector<std::string> groups = {
        "hoeffding",   "bennett",     "bernstein", "inf_mgf",   "theta",     "theorem21", "theorem31",
        "corollary22", "corollary23", "theorem22", "theorem23", "bentkus",   "exact"};
    return groups;
}

CommandResult cmd_bounds(const SumModel& model, const SweepSpec& sweep) {
    for (const auto& g : sweep.bounds_selected)
        if (std::find(bound_groups().begin(), bound_groups().end(), g) == bound_groups().end())
            throw Error(ErrorKind::parse_error, "--bounds: unknown bound \"" + g + "\"");
    for (std::size_t i = 0; i < sweep.x_grid.size(); ++i)
        if (!(sweep.x_grid[i] >= 0.0) || (i && sweep.x_grid[i] < sweep.x_grid[i - 1]))
            throw Error(ErrorKind::invalid_parameter, "x grid must be ascending and >= 0");

    std::vector<std::string> groups;
    for (const auto& g : bound_groups())
        if (sweep.bounds_selected.empty() || sweep.bounds_selected.count(g)) groups.push_back(g);
    const auto wants = [&](const std::string& g) {
        return std::find(groups.begin(), groups.end(), g) != groups.end();
    };

    const double sigma = model.sigma();
    const bool bounded_by_one = model.a_max() <= 1.0 + 1e-12;
    const double C = select_constant(sweep.constants, sweep.delta, sweep.c3_policy);
    const double C3 = select_constant(sweep.constants, 1.0, sweep.c3_policy);
    const double B_ratio = moment_profile(model, 1.0).B_ratio;
    const double B = sweep.B.value_or(B_ratio);

    // Per-model setup shared by all rows.
    std::map<std::string, CellError> setup_errors;
    std::unique_ptr<ExactSum> exact;
    std::unique_ptr<BentkusEnvelope> bentkus;
    if (wants("exact"))
        if (auto e = guarded([&] { exact = std::make_unique<ExactSum>(model); })) setup_errors["exact"] = *e;
    if (wants("bentkus"))
        if (auto e = guarded([&] { bentkus = std::make_unique<BentkusEnvelope>(model); }))
            setup_errors["bentkus"] = *e;

    Table table;
    table.columns.push_back("x");
    for (const auto& g : groups) {
        if (g == "theorem21" || g == "theorem31" || g == "corollary22" || g == "theorem23") {
            for (const char* suffix : {"_lower", "_center", "_upper", "_valid"}) table.columns.push_back(g + suffix);
        } else if (g == "corollary23" || g == "theorem22") {
            table.columns.push_back(g + "_upper");
        } else if (g == "exact") {
            table.columns.push_back("exact_tail");
            table.columns.push_back("tail_kind");
        } else {
            table.columns.push_back(g);
        }
    }

    const std::size_t n_rows = sweep.x_grid.size();
    table.rows.assign(n_rows, {});
    std::vector<json> json_rows(n_rows);
    std::vector<std::map<std::string, CellError>> row_errors(n_rows);

    parallel_for(n_rows, [&](std::size_t i) {
        const double x = sweep.x_grid[i];
        auto& cells = table.rows[i];
        auto& jr = json_rows[i];
        cells.push_back(format_number(x));
        jr["x"] = x;
        auto note_error = [&](const std::string& g, const std::optional<CellError>& e) {
            if (e) {
                row_errors[i].emplace(g, *e);
                jr[g] = nullptr;
            }
        };
        auto interval = [&](const std::string& g, const std::function<SharpInterval()>& f) {
            SharpInterval s;
            auto e = guarded([&] { s = f(); });
            note_error(g, e);
            if (e) {
                cells.insert(cells.end(), 4, "");
                return;
            }
            cells.push_back(s.valid ? format_number(s.lower) : "");
            cells.push_back(s.valid ? format_number(s.center) : "");
            cells.push_back(format_number(s.upper));
            cells.push_back(bool_cell(s.valid));
            jr[g] = to_json(s);
        };
        auto scalar = [&](const std::string& g, const std::function<double()>& f) {
            double v = std::nan("");
            auto e = guarded([&] { v = f(); });
            note_error(g, e);
            cells.push_back(e ? "" : format_number(v));
            if (!e) jr[g] = std::isfinite(v) ? json(v) : json(nullptr);
        };
        auto classical = [&](const std::string& g, const std::function<BoundValue()>& f) {
            scalar(g, [&] {
                if (!bounded_by_one)
                    throw Error(ErrorKind::hypothesis_violation, g + " requires xi_i <= 1");
                return f().value;
            });
        };

        for (const auto& g : groups) {
            if (auto it = setup_errors.find(g); it != setup_errors.end()) {
                const std::size_t width = g == "exact" ? 2 : 1;
                cells.insert(cells.end(), width, "");
                jr[g] = nullptr;
                continue;
            }
            if (g == "hoeffding") {
                classical(g, [&] { return hoeffding_bound(x, sigma, model.n()); });
            } else if (g == "bennett") {
                classical(g, [&] { return bennett_bound(x, sigma); });
            } else if (g == "bernstein") {
                classical(g, [&] { return bernstein_bound(x, sigma); });
            } else if (g == "inf_mgf") {
                scalar(g, [&] { return inf_mgf(model, x); });
            } else if (g == "theta") {
                scalar(g, [&] { return mills_ratio(x); });
            } else if (g == "theorem21") {
                interval(g, [&] { return theorem21_interval(model, x, B, sweep.delta, C); });
            } else if (g == "theorem31") {
                interval(g, [&] { return theorem31_interval(model, x, sweep.delta, C); });
            } else if (g == "corollary22") {
                interval(g, [&] { return corollary22_interval(model, x, B); });
            } else if (g == "theorem23") {
                interval(g, [&] { return theorem23_interval(model, x); });
            } else if (g == "corollary23") {
                scalar(g, [&] { return corollary23_upper(model, x, B); });
            } else if (g == "theorem22") {
                scalar(g, [&] { return theorem22_upper(model, x, C3, B); });
            } else if (g == "bentkus") {
                scalar(g, [&] { return bentkus->at(x).capped; });
            } else if (g == "exact") {
                const double p = exact->tail(x * sigma, sweep.strict);
                cells.push_back(format_number(p));
                cells.push_back(tail_kind(sweep.strict));
                jr[g] = {{"p", p}, {"tail_kind", tail_kind(sweep.strict)}};
            }
        }
    });

    // One diagnostic per group, first occurrence in row order.
    CommandResult out;
    std::map<std::string, CellError> first = setup_errors;
    for (const auto& errs : row_errors)
        for (const auto& [g, e] : errs) first.emplace(g, e);
    for (const auto& g : groups) {
        auto it = first.find(g);
        if (it == first.end()) continue;
        const auto& e = it->second;
        out.diagnostics += g + ": " + to_string(e.kind) + ": " + e.message + "\n";
        const bool explicit_choice = sweep.bounds_selected.count(g) > 0;
        if (explicit_choice && e.kind == ErrorKind::hypothesis_violation) out.exit_code = kHypothesisViolation;
    }

    if (sweep.output_format == OutputFormat::csv) {
        out.output = render_csv("bounds", table);
    } else {
        json doc{{"schema_version", kSchemaVersion},
                 {"command", "bounds"},
                 {"model", model_summary(model)},
                 {"tail_kind", tail_kind(sweep.strict)},
                 {"constants", {{"C", C}, {"C3", C3}, {"B", B}, {"delta", sweep.delta}}},
                 {"rows", json_rows}};
        json diag = json::object();
        for (const auto& [g, e] : first) diag[g] = std::string(to_string(e.kind)) + ": " + e.message;
        doc["diagnostics"] = diag;
        out.output = doc.dump(2) + "\n";
    }
    return out;
}

CommandResult cmd_figure1(const std::vector<std::int64_t>& n_list, double x_max, int points) {
    if (points < 1) throw Error(ErrorKind::invalid_parameter, "points must be >= 1");
    Table table;
    table.columns = {"n", "x", "exact_tail", "theta_hoeffding", "ratio", "band", "tail_kind"};
    for (const auto n : n_list) {
        if (n < 1) throw Error(ErrorKind::invalid_parameter, "n must be >= 1");
        const auto model = rademacher_model(n);
        const ExactSum exact(model);
        const double sigma = model.sigma();
        const double top = x_max > 0.0 ? x_max : 0.606 * sigma;
        for (const double x : linspace(0.0, top, points)) {
            const double tail = exact.tail(x * sigma, false);
            if (tail < 1e-12) continue;
            const double th = mills_ratio(x) * hoeffding_bound(x, sigma, n).value;
            // Relative half-width of the two-sided expansion around Theta * H_n.
            std::string band;
            if (theorem23_t(x, sigma) < 1.0) band = format_number(theorem23_cx(x, sigma) / (sigma * mills_ratio(x)));
            table.rows.push_back({std::to_string(n), format_number(x), format_number(tail), format_number(th),
                                  format_number(tail / th), band, tail_kind(false)});
        }
    }
    return {kOk, render_csv("figure1", table), ""};
}

namespace {

struct Containment {
    std::string theorem;
    std::string status;  // pass, fail, skipped (hypothesis), unsupported
    int points = 0;
    int violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;
    double range_limit = 0.0;
    std::string note;
};

json to_json(const Containment& c) {
    json j{{"theorem", c.theorem}, {"status", c.status}, {"points", c.points}, {"violations", c.violations}};
    j["worst_margin"] = std::isfinite(c.worst_margin) ? json(c.worst_margin) : json(nullptr);
    j["worst_x"] = c.worst_x;
    j["range_limit"] = c.range_limit;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

constexpr double kContainTol = 1e-9;

// Records one oracle comparison. Margins are relative to the tail (or to the
// bound when the tail is zero); negative means violated.
void record(Containment& c, double x, double tail, double lower, double upper) {
    ++c.points;
    const double scale = std::max(tail, 1e-300);
    const double m_up = (upper * (1.0 + kContainTol) - tail) / scale;
    const double m_lo = (tail - lower * (1.0 - kContainTol)) / scale;
    const double m = std::min(m_up, m_lo);
    if (m < c.worst_margin) {
        c.worst_margin = m;
        c.worst_x = x;
    }
    if (m < 0.0) ++c.violations;
}

}  // namespace

CommandResult cmd_verify(const SumModel& model, const VerifySpec& spec) {
    const double C = select_constant(spec.constants, spec.delta);
    const double C3 = select_constant(spec.constants, 1.0);
    const auto profile = moment_profile(model, spec.delta);
    const double B = spec.B.value_or(moment_profile(model, 1.0).B_ratio);
    const double sigma = model.sigma();
    bool ok = true;

    json doc{{"schema_version", kSchemaVersion}, {"command", "verify"}, {"model", model_summary(model)}};
    doc["moment_profile"] = to_json(profile);
    doc["B"] = B;
    doc["delta"] = spec.delta;
    doc["C"] = C;

    const auto cond_grid = default_condition_A_grid(B);
    const auto cond = check_condition_A(model, B, cond_grid);
    doc["condition_A"] = to_json(cond);

    std::vector<double> grid = spec.lambda_grid;
    if (grid.empty()) grid = linspace(0.0, 1.0 / std::max(B, model.a_max()), 50);
    const auto lemmas = verify_lemma_suite(model, B, spec.delta, grid);
    doc["lemma_suite"] = to_json(lemmas);
    ok = ok && lemmas.all_hold();

    // Exact oracle for the containment sweep; absent for non-lattice models.
    std::unique_ptr<ExactSum> exact;
    std::string exact_note;
    if (auto e = guarded([&] { exact = std::make_unique<ExactSum>(model); })) exact_note = e->message;

    // Berry-Esseen distance at the tilts matching x = 0, 1, 2, 3.
    json be = json::array();
    if (exact) {
        for (const double x : {0.0, 1.0, 2.0, 3.0}) {
            double lambda = 0.0;
            if (guarded([&] { lambda = solve_lambda_bar(model, x).lambda_bar; })) continue;
            BerryEsseenReport r{};
            if (guarded([&] { r = berry_esseen_tilted(model, lambda, spec.delta, C); })) continue;
            auto j = to_json(r);
            j["x"] = x;
            be.push_back(std::move(j));
            ok = ok && r.holds;
        }
    }
    doc["berry_esseen"] = be;

    json contain = json::array();
    auto sweep = [&](const std::string& name, double limit, bool open_end,
                     const std::function<std::pair<double, double>(double)>& bounds, bool strict = true) {
        Containment c;
        c.theorem = name;
        c.range_limit = limit;
        if (!exact) {
            c.status = "unsupported";
            c.note = exact_note;
            contain.push_back(to_json(c));
            return;
        }
        const double top = open_end ? limit * (1.0 - 1e-9) : limit;
        std::optional<CellError> err;
        for (const double x : linspace(0.0, top, spec.x_points)) {
            std::pair<double, double> lu;
            err = guarded([&] { lu = bounds(x); });
            if (err) break;
            record(c, x, exact->tail(x * sigma, strict), lu.first, lu.second);
        }
        if (err && err->kind == ErrorKind::hypothesis_violation) {
            c = Containment{name, "skipped (hypothesis)", 0, 0, std::numeric_limits<double>::infinity(), 0.0, limit,
                            err->message};
        } else if (err) {
            c.status = "error";
            c.note = err->message;
            ok = false;
        } else {
            c.status = c.violations == 0 ? "pass" : "fail";
            ok = ok && c.violations == 0;
        }
        contain.push_back(to_json(c));
    };
    auto as_pair = [](const SharpInterval& s) { return std::pair{s.lower, s.upper}; };

    sweep("theorem21", 0.25 * sigma / B, true,
          [&](double x) { return as_pair(theorem21_interval(model, x, B, spec.delta, C)); });
    // Theorem 3.1 holds up to the top of the support; the sweep stops at 90% of it.
    sweep("theorem31", 0.9 * model.sum_upper() / sigma, false,
          [&](double x) { return as_pair(theorem31_interval(model, x, spec.delta, C)); });
    sweep("corollary22", 0.1 * sigma / B, false, [&](double x) { return as_pair(corollary22_interval(model, x, B)); });
    sweep("corollary23", 0.1 * sigma / B, false,
          [&](double x) { return std::pair{0.0, corollary23_upper(model, x, B)}; });
    sweep("theorem22", 0.25 * sigma / B, true,
          [&](double x) { return std::pair{0.0, theorem22_upper(model, x, C3, B)}; });
    sweep("theorem23", 0.606 * sigma, false, [&](double x) { return as_pair(theorem23_interval(model, x)); });
    {
        std::unique_ptr<BentkusEnvelope> env;
        auto e = guarded([&] { env = std::make_unique<BentkusEnvelope>(model); });
        sweep(
            "bentkus", model.sum_upper() / sigma, false,
            [&](double x) {
                if (e) throw Error(e->kind, e->message);
                return std::pair{0.0, env->at(x).value};
            },
            false);
    }
    doc["containment"] = contain;
    doc["tail_kind"] = {{"theorems", "strict"}, {"bentkus", "nonstrict"}};
    doc["passed"] = ok;

    CommandResult out;
    out.output = doc.dump(2) + "\n";
    out.exit_code = ok ? kOk : kVerificationFailure;
    if (!ok) out.diagnostics = "verification failed; see report\n";
    return out;
}

CommandResult cmd_rate(const SumModel& model, const std::vector<double>& y_grid) {
    Table table;
    table.columns = {"y", "rate", "lambda_bar", "exp_neg_n_rate", "flag"};
    CommandResult out;
    const double n = static_cast<double>(model.n());
    for (const double y : y_grid) {
        RatePoint r{};
        auto e = guarded([&] { r = rate_point(model, y); });
        if (e) {
            table.rows.push_back({format_number(y), "", "", "", to_string(e->kind)});
            continue;
        }
        table.rows.push_back({format_number(y), format_number(r.rate), format_number(r.lambda_bar),
                              format_number(std::exp(-n * r.rate)), "ok"});
    }
    out.output = render_csv("rate", table);
    return out;
}

CommandResult cmd_mc(const SumModel& model, double x, std::int64_t samples, std::uint64_t seed,
                     McMethod method, bool strict) {
    if (!(x >= 0.0)) throw Error(ErrorKind::invalid_parameter, "x must be >= 0");
    const double threshold = x * model.sigma();
    const auto est = method == McMethod::tilted ? tilted_mc_tail(model, threshold, strict, samples, seed)
                                                : mc_tail(model, threshold, strict, samples, seed);
    json doc{{"schema_version", kSchemaVersion},
             {"command", "mc"},
             {"model", model_summary(model)},
             {"x", x},
             {"threshold", threshold},
             {"tail_kind", tail_kind(strict)},
             {"estimate", to_json(est)}};
    if (est.hits == 0) {
        // Rule of three: with zero hits in N draws, p < 3/N at about 95% confidence.
        const double upper = 3.0 / static_cast<double>(samples);
        doc["upper_95"] = upper;
        doc["note"] = "no samples hit the tail event; p_hat = 0 and the one-sided 95% upper bound is 3/N = " +
                      format_number(upper);
    }
    return {kOk, doc.dump(2) + "\n", ""};
}

}  // namespace tailbound::cli
