#include "tailbound/report.hpp"

#include <fstream>
#include <sstream>

#include "tailbound/error.hpp"

namespace tailbound {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::parse_error, where + ": " + what);
}

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, "expected a number");
    return j.get<double>();
}

// JSON null for non-finite values keeps the output valid JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

SumModel parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; translate it to line/column.
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        parse_fail("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
    }
    if (!doc.is_object()) parse_fail("document", "expected an object");
    if (!doc.contains("components")) parse_fail("document", "missing field \"components\"");
    const auto& comps = doc["components"];
    if (!comps.is_array() || comps.empty()) parse_fail("components", "expected a non-empty array");

    std::vector<Component> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string base = "components[" + std::to_string(i) + "]";
        const auto& c = comps[i];
        if (!c.is_object()) parse_fail(base, "expected an object");
        if (!c.contains("atoms")) parse_fail(base, "missing field \"atoms\"");
        const auto& atoms = c["atoms"];
        if (!atoms.is_array()) parse_fail(base + ".atoms", "expected an array");
        std::vector<Atom> list;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            const std::string where = base + ".atoms[" + std::to_string(k) + "]";
            const auto& a = atoms[k];
            if (!a.is_array() || a.size() != 2) parse_fail(where, "expected [value, prob]");
            list.push_back({number_at(a[0], where + "[0]"), number_at(a[1], where + "[1]")});
        }
        std::int64_t mult = 1;
        if (c.contains("multiplicity")) {
            const auto& m = c["multiplicity"];
            if (!m.is_number_integer() || m.get<std::int64_t>() < 1)
                parse_fail(base + ".multiplicity", "expected a positive integer");
            mult = m.get<std::int64_t>();
        }
        if (auto msg = validate_atoms(list); !msg.empty())
            throw Error(ErrorKind::invalid_model, base + ": " + msg);
        out.push_back({DiscreteDistribution(std::move(list)), mult});
    }
    return SumModel(std::move(out));
}

SumModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::parse_error, path + ": cannot open model file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

json model_to_json(const SumModel& model) {
    json comps = json::array();
    for (const auto& c : model.components()) {
        json atoms = json::array();
        for (const auto& a : c.dist.atoms()) atoms.push_back({a.value, a.prob});
        comps.push_back({{"atoms", atoms}, {"multiplicity", c.multiplicity}});
    }
    return {{"components", comps}};
}

json to_json(const BoundValue& b) {
    return {{"name", std::string(to_string(b.name))}, {"value", num(b.value)}, {"valid", b.valid}};
}

json to_json(const SharpInterval& s) {
    return {{"theorem", s.theorem},
            {"lower", num(s.lower)},
            {"center", num(s.center)},
            {"upper", num(s.upper)},
            {"epsilon_term", num(s.epsilon_term)},
            {"t_param", num(s.t_param)},
            {"inf_mgf", num(s.inf_mgf)},
            {"hoeffding_cap", num(s.hoeffding_cap)},
            {"constants_used", {{"C", s.constants_used.C}, {"B", s.constants_used.B}, {"delta", s.constants_used.delta}}},
            {"valid", s.valid},
            {"range_limit", num(s.range_limit)},
            {"note", s.note}};
}

json to_json(const TailEstimate& t) {
    json j{{"p", num(t.p)},
           {"stderr", num(t.stderr_)},
           {"method", std::string(to_string(t.method))},
           {"n_samples", t.n_samples},
           {"seed", t.seed},
           {"hits", t.hits}};
    if (t.method == TailMethod::tilted_mc) {
        j["lambda_bar"] = num(t.lambda_bar);
        j["relative_stderr"] = t.p > 0.0 ? num(t.stderr_ / t.p) : json(nullptr);
    }
    if (t.method == TailMethod::exact) j["mass_drift"] = num(t.mass_drift);
    return j;
}

json to_json(const LemmaSuiteReport& r) {
    json arr = json::array();
    for (const auto& c : r.checks) {
        json j{{"name", c.name},
               {"status", to_string(c.status)},
               {"holds", c.status != LemmaStatus::violated},
               {"worst_margin", num(c.worst_margin)},
               {"worst_lambda", num(c.worst_lambda)}};
        if (!c.note.empty()) j["note"] = c.note;
        arr.push_back(std::move(j));
    }
    return arr;
}

json to_json(const BerryEsseenReport& r) {
    return {{"lambda", r.lambda},
            {"sigma_bar", num(r.sigma_bar)},
            {"sup_distance", num(r.sup_distance)},
            {"bound_general", num(r.bound_general)},
            {"bound_two_sided", r.two_sided_applicable ? num(r.bound_two_sided) : json(nullptr)},
            {"holds", r.holds}};
}

json to_json(const ConditionAReport& r) {
    return {{"holds", r.holds}, {"worst_margin", num(r.worst_margin)}, {"worst_lambda", num(r.worst_lambda)}};
}

json to_json(const MomentProfile& m) {
    return {{"delta", m.delta}, {"B_abs", num(m.B_abs)}, {"B_ratio", num(m.B_ratio)}, {"abs_moment_sum", num(m.abs_moment_sum)}};
}

}  // namespace tailbound
