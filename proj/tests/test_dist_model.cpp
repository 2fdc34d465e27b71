#include <doctest.h>

#include <cmath>
#include <random>

#include "tailbound/dist_model.hpp"
#include "tailbound/error.hpp"
#include "test_support.hpp"

using namespace tailbound;

namespace {

DiscreteDistribution skewed() { return DiscreteDistribution({{1.0, 0.2}, {-0.25, 0.8}}); }

}  // namespace

TEST_CASE("absolute moments") {
    CHECK(abs_moment(rademacher(), 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(abs_moment(rademacher(), 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    // 0.2 * 1 + 0.8 * 0.0625
    CHECK(abs_moment(skewed(), 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(skewed().variance() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("distribution invariants are enforced") {
    auto kind_of = [](std::vector<Atom> atoms) {
        try {
            DiscreteDistribution d(std::move(atoms));
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::unsupported;  // sentinel: nothing thrown
    };
    CHECK(kind_of({{1.0, 1.0}}) == ErrorKind::invalid_model);
    CHECK(kind_of({{1.0, 0.6}, {-1.0, 0.4}}) == ErrorKind::invalid_model);         // mean 0.2
    CHECK(kind_of({{1.0, 0.5}, {-1.0, 0.6}}) == ErrorKind::invalid_model);         // mass 1.1
    CHECK(kind_of({{1.0, 1.0}, {-1.0, 0.0}}) == ErrorKind::invalid_model);         // zero prob
    CHECK(kind_of({{NAN, 0.5}, {-1.0, 0.5}}) == ErrorKind::invalid_model);
    CHECK(kind_of({{0.0, 0.5}, {0.0, 0.5}}) == ErrorKind::invalid_model);
    CHECK(validate_atoms(std::vector<Atom>{{1.0, 0.6}, {-1.0, 0.4}}).find("mean") != std::string::npos);

    const auto d = DiscreteDistribution({{0.5, 0.25}, {-0.5, 0.25}, {0.0, 0.5}});
    CHECK(d.lower() == -0.5);
    CHECK(d.upper() == 0.5);
    CHECK(d.atoms().front().value == -0.5);
}

TEST_CASE("hoeffding eta law") {
    const auto r = hoeffding_eta(1.0);
    REQUIRE(r.atoms().size() == 2);
    CHECK(r.atoms()[0].value == -1.0);
    CHECK(r.atoms()[0].prob == 0.5);
    CHECK(r.atoms()[1].prob == 0.5);
    CHECK(r.variance() == doctest::Approx(1.0).epsilon(1e-15));

    const auto q = hoeffding_eta(0.25);
    CHECK(q.atoms()[0].value == -0.25);
    CHECK(q.atoms()[0].prob == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(q.atoms()[1].value == 1.0);
    CHECK(q.atoms()[1].prob == doctest::Approx(0.2).epsilon(1e-15));

    CHECK_THROWS_AS(hoeffding_eta(0.0), Error);
    CHECK_THROWS_AS(hoeffding_eta(-1.0), Error);
}

TEST_CASE("property: eta law has mean 0 and variance v") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lv(-6.0, 6.0);
    for (int i = 0; i < 500; ++i) {
        const double v = std::pow(10.0, lv(rng));
        const auto d = hoeffding_eta(v);
        double mean = 0.0;
        for (const auto& a : d.atoms()) mean += a.value * a.prob;
        CHECK(std::abs(mean) <= 1e-12 * std::max(1.0, v));
        CHECK(std::abs(d.variance() - v) <= 1e-12 * v);
    }
}

TEST_CASE("sum model aggregates") {
    const SumModel m({{rademacher(), 10}, {skewed(), 4}});
    CHECK(m.n() == 14);
    CHECK(m.sigma2() == doctest::Approx(11.0).epsilon(1e-14));
    CHECK(m.sigma() == doctest::Approx(std::sqrt(11.0)).epsilon(1e-14));
    CHECK(m.a_max() == 1.0);
    CHECK(m.a_min() == -1.0);
    CHECK(m.sum_upper() == doctest::Approx(14.0).epsilon(1e-14));
    CHECK(m.sum_lower() == doctest::Approx(-11.0).epsilon(1e-14));
    CHECK_THROWS_AS(SumModel({}), Error);
    CHECK_THROWS_AS(SumModel({{rademacher(), 0}}), Error);
}

TEST_CASE("moment profile") {
    const auto r = moment_profile(rademacher_model(37), 1.0);
    CHECK(r.B_abs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.B_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.abs_moment_sum == doctest::Approx(37.0).epsilon(1e-15));

    // E|xi|^3 = 0.2 + 0.8/64 = 0.2125; E xi^2 = 0.25.
    const auto s = moment_profile(iid_model(skewed(), 5), 1.0);
    CHECK(s.B_ratio == doctest::Approx(0.85).epsilon(1e-14));

    const auto h = moment_profile(iid_model(skewed(), 3), 0.5);
    CHECK(h.B_abs == doctest::Approx(std::pow(abs_moment(skewed(), 2.5), 1.0 / 2.5)).epsilon(1e-15));
    CHECK(h.abs_moment_sum == doctest::Approx(3.0 * abs_moment(skewed(), 2.5)).epsilon(1e-15));

    CHECK_THROWS_AS(moment_profile(rademacher_model(2), 0.0), Error);
    CHECK_THROWS_AS(moment_profile(rademacher_model(2), 1.5), Error);
}

TEST_CASE("condition (A)") {
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
    const auto r = check_condition_A(rademacher_model(50), 1.0, grid);
    CHECK(r.holds);
    CHECK(r.worst_margin == 0.0);  // attained at lambda = 0
    CHECK(r.worst_lambda == 0.0);

    const auto m = iid_model(skewed(), 40);
    std::vector<double> fine;
    for (int k = 0; k < 100; ++k) fine.push_back(5.0 * k / 99.0);
    CHECK(check_condition_A(m, 0.85, fine).holds);
    CHECK(condition_A_holds(m, 0.85, 1.0));

    // Negative third moment: E xi^2 e^{lambda xi} initially falls below
    // sigma^2, so a tiny B fails.
    const auto mirrored = iid_model(DiscreteDistribution({{-1.0, 0.2}, {0.25, 0.8}}), 40);
    CHECK_FALSE(check_condition_A(mirrored, 0.01, std::vector<double>{0.0, 0.5, 1.0}).holds);
    CHECK(check_condition_A(mirrored, moment_profile(mirrored, 1.0).B_ratio, fine).holds);

    const auto g = default_condition_A_grid(2.0);
    CHECK(g.size() == 201);
    CHECK(g.front() == 0.0);
    CHECK(g[1] == doctest::Approx(1e-6));
    CHECK(g.back() == doctest::Approx(5.0));
}

TEST_CASE("property: Jensen moment ordering and condition (A) at B_ratio") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        const auto d = testing_support::random_distribution(rng);
        for (double delta : {0.25, 0.5, 1.0}) {
            const double lhs = std::pow(d.variance(), (2.0 + delta) / 2.0);
            CHECK(lhs <= abs_moment(d, 2.0 + delta) * (1.0 + 1e-12));
        }
        const auto m = testing_support::random_model(rng, 5, 50);
        const double B = moment_profile(m, 1.0).B_ratio;
        CHECK(check_condition_A(m, B, default_condition_A_grid(B)).holds);
    }
}

TEST_CASE("tilted moments of a single law") {
    const auto r = rademacher();
    for (double l : {0.0, 0.3, 1.0, 5.0, 40.0}) {
        CHECK(r.log_mgf(l) == doctest::Approx(std::log(std::cosh(l))).epsilon(1e-14));
        CHECK(r.tilted_mean(l) == doctest::Approx(std::tanh(l)).epsilon(1e-14));
        const double sech = 1.0 / std::cosh(l);
        CHECK(r.tilted_variance(l) == doctest::Approx(sech * sech).epsilon(1e-10));
    }
    // Tiny tilt: log cosh(l) ~ l^2/2 with no cancellation.
    CHECK(r.log_mgf(1e-9) == doctest::Approx(0.5e-18).epsilon(1e-12));
}
