// tailbound: bound sweeps, Figure-1 ratios, inequality verification,
// rate functions and Monte Carlo tails from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tailbound/cli.hpp"
#include "tailbound/error.hpp"
#include "tailbound/report.hpp"

using namespace tailbound;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parse_error:
        case ErrorKind::invalid_model:
        case ErrorKind::invalid_parameter: return cli::kParseError;
        case ErrorKind::hypothesis_violation: return cli::kHypothesisViolation;
        default: return cli::kGenericError;
    }
}

std::set<std::string> split_list(const std::string& list) {
    std::set<std::string> out;
    std::string cur;
    for (char ch : list + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.insert(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tail bounds for sums of bounded independent random variables"};
    app.require_subcommand(1);

    std::string model_path, x_grid = "0:3:31", bounds_list, format = "csv", y_grid = "0:0.5:11", lambda_grid;
    std::string n_list = "100,400,2500,10000", method = "tilted";
    double c3 = 0.56, delta = 1.0, x = 1.0, x_max = 0.0;
    std::optional<double> B, c_delta;
    bool strict_flag = false, nonstrict_flag = false;
    std::uint64_t seed = 1;
    std::int64_t samples = 100000;
    int points = 100, x_points = 25;
    std::string c3_policy = "universal";

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", model_path, "Model JSON file")->required();
    };
    auto add_strictness = [&](CLI::App* sub) {
        auto* s = sub->add_flag("--strict", strict_flag, "Tail event S_n > x sigma (default)");
        auto* ns = sub->add_flag("--nonstrict", nonstrict_flag, "Tail event S_n >= x sigma");
        s->excludes(ns);
    };
    auto add_constants = [&](CLI::App* sub) {
        sub->add_option("--c3", c3, "Berry-Esseen constant C3 for delta = 1");
        sub->add_option("--c3-policy", c3_policy, "universal|iid|binomial")
            ->check(CLI::IsMember({"universal", "iid", "binomial"}));
        sub->add_option("--delta", delta, "Moment exponent delta in (0, 1]")->check(CLI::Range(1e-9, 1.0));
        sub->add_option("--c-delta", c_delta, "Berry-Esseen constant C_{2+delta}, required for delta < 1");
        sub->add_option("--B", B, "Moment constant B (default: max_i E|xi_i|^3 / E xi_i^2)");
    };

    auto* bounds = app.add_subcommand("bounds", "Evaluate every bound over an x grid");
    add_model(bounds);
    bounds->add_option("--x-grid", x_grid, "a:b:steps or comma list");
    bounds->add_option("--bounds", bounds_list, "Comma list of bound groups (default: all)");
    bounds->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    add_constants(bounds);
    add_strictness(bounds);

    auto* figure1 = app.add_subcommand("figure1", "Rademacher ratio P(S_n >= x sqrt n) / (Theta(x) H_n)");
    figure1->add_option("--n-list", n_list, "Comma list of n");
    figure1->add_option("--x-max", x_max, "Largest x (default 0.606 sqrt n)");
    figure1->add_option("--points", points, "Grid points per n");

    auto* verify = app.add_subcommand("verify", "Check lemma inequalities and oracle containment");
    add_model(verify);
    add_constants(verify);
    verify->add_option("--lambda-grid", lambda_grid, "a:b:steps for the lemma checks");
    verify->add_option("--points", x_points, "x points per theorem range");

    auto* rate = app.add_subcommand("rate", "Fenchel-Legendre rate function");
    add_model(rate);
    rate->add_option("--y-grid", y_grid, "a:b:steps or comma list");

    auto* mc = app.add_subcommand("mc", "Monte Carlo tail estimate");
    add_model(mc);
    mc->add_option("--x", x, "Threshold in units of sigma");
    mc->add_option("--samples", samples, "Number of samples")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "RNG seed");
    mc->add_option("--method", method, "mc|tilted")->check(CLI::IsMember({"mc", "tilted"}));
    add_strictness(mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kParseError;
    }

    BerryEsseenConstants constants;
    constants.C3_universal = c3;
    constants.C_2plusdelta = c_delta;
    const C3Policy policy = c3_policy == "iid"        ? C3Policy::iid
                            : c3_policy == "binomial" ? C3Policy::binomial
                                                      : C3Policy::universal;
    const bool strict = !nonstrict_flag;

    try {
        cli::CommandResult result;
        if (*bounds) {
            cli::SweepSpec sweep;
            sweep.x_grid = cli::parse_grid(x_grid);
            sweep.bounds_selected = split_list(bounds_list);
            sweep.output_format = format == "json" ? cli::OutputFormat::json : cli::OutputFormat::csv;
            sweep.constants = constants;
            sweep.c3_policy = policy;
            sweep.delta = delta;
            sweep.strict = strict;
            sweep.B = B;
            result = cli::cmd_bounds(load_model_file(model_path), sweep);
        } else if (*figure1) {
            std::vector<std::int64_t> ns;
            for (const double v : cli::parse_grid(n_list)) {
                if (v != static_cast<double>(static_cast<std::int64_t>(v)))
                    throw Error(ErrorKind::parse_error, "--n-list: expected integers");
                ns.push_back(static_cast<std::int64_t>(v));
            }
            result = cli::cmd_figure1(ns, x_max, points);
        } else if (*verify) {
            cli::VerifySpec spec;
            spec.B = B;
            spec.delta = delta;
            spec.constants = constants;
            if (!lambda_grid.empty()) spec.lambda_grid = cli::parse_grid(lambda_grid);
            spec.x_points = x_points;
            result = cli::cmd_verify(load_model_file(model_path), spec);
        } else if (*rate) {
            result = cli::cmd_rate(load_model_file(model_path), cli::parse_grid(y_grid));
        } else if (*mc) {
            result = cli::cmd_mc(load_model_file(model_path), x, samples, seed,
                                 method == "mc" ? cli::McMethod::mc : cli::McMethod::tilted, strict);
        }
        std::cout << result.output;
        std::cerr << result.diagnostics;
        return result.exit_code;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
}
