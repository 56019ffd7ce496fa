#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "goerw/analysis.hpp"
#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

TEST_CASE("gambler's ruin closed form") {
    CHECK(gambler_ruin_exact(GamblerChain({1.0}, 1)) == doctest::Approx(0.5));
    CHECK(gambler_ruin_exact(GamblerChain({2.0}, 1)) == doctest::Approx(2.0 / 3.0));
    CHECK(gambler_ruin_exact(GamblerChain({2.0, 2.0}, 1)) == doctest::Approx(6.0 / 7.0));
    CHECK(gambler_ruin_exact(GamblerChain({2.0, 2.0}, 0)) == 1.0);
    CHECK(gambler_ruin_exact(GamblerChain({2.0, 2.0}, 3)) == 0.0);
    const auto lin = gambler_ruin_profile(GamblerChain(std::vector<double>(9, 1.0), 0));
    for (std::size_t i = 0; i < lin.size(); ++i)
        CHECK(lin[i] == doctest::Approx(1.0 - i / 10.0));
    CHECK_THROWS_AS(GamblerChain({}, 0), Error);
    CHECK_THROWS_AS(GamblerChain({1.0, -1.0}, 1), Error);
    CHECK_THROWS_AS(GamblerChain({1.0}, 3), Error);
}

TEST_CASE("gambler's ruin solves its difference equation") {
    SplitMix64 rng(17);
    for (int c = 0; c < 200; ++c) {
        const std::size_t N = 2 + rng() % 49;
        std::vector<double> mu(N - 1);
        for (auto& m : mu)
            m = 0.1 + 4.0 * rng.uniform();
        const GamblerChain chain(mu, 0);
        const auto x = gambler_ruin_profile(chain);
        CHECK(x.front() == 1.0);
        CHECK(x.back() == 0.0);
        for (std::uint32_t i = 1; i < N; ++i) {
            CHECK(std::abs(x[i] - (chain.q(i) * x[i - 1] + chain.p(i) * x[i + 1])) <= 1e-12);
            CHECK(x[i] <= x[i - 1]);
        }
    }
}

TEST_CASE("gambler's ruin Monte Carlo") {
    const GamblerChain sym(std::vector<double>(3, 1.0), 2);
    CHECK(gambler_ruin_mc(sym, 20000, 1).within(0.5, 3.0));
    const GamblerChain biased({2.0, 2.0}, 1);
    CHECK(gambler_ruin_mc(biased, 20000, 2).within(6.0 / 7.0, 3.0));
    const auto small = gambler_ruin_mc(biased, 100, 3);
    CHECK(small.trials == 100);
    CHECK(small.std_error() > 0.0);
}

TEST_CASE("hoeffding bound") {
    const std::vector<std::pair<double, double>> unit{{0.0, 1.0}};
    CHECK(hoeffding_bound(1.0, unit) == doctest::Approx(2 * std::exp(-2.0)));
    CHECK(hoeffding_bound(1e-9, unit) == 1.0);
    CHECK(hoeffding_bound(2.0, unit) < hoeffding_bound(1.0, unit));
    const std::vector<std::pair<double, double>> wider{{0.0, 2.0}};
    CHECK(hoeffding_bound(2.0, wider) > hoeffding_bound(2.0, unit));
    CHECK_THROWS_AS(hoeffding_bound(1.0, {}), Error);

    // Ranges (1/n, 2/n): the bound sits below 2 exp(-(3 eps^2/pi^2)(log N)^2).
    const double eps = 0.3;
    for (std::uint32_t N : {100u, 1000u, 10000u}) {
        std::vector<std::pair<double, double>> r;
        for (std::uint32_t n = 3; n <= N; ++n)
            r.emplace_back(1.0 / n, 2.0 / n);
        const double t = eps / 2 * std::log(double(N));
        const double shape = 2 * std::exp(-(3 * eps * eps / (std::numbers::pi * std::numbers::pi)) *
                                          std::pow(std::log(double(N)), 2));
        CHECK(hoeffding_bound(t, r) <= std::min(1.0, shape) + 1e-15);
    }
}

TEST_CASE("tree flows") {
    const Tree path = build_path(5);
    const auto f = tree_flow(path, EdgeWeighting({0, 0.9, 0.5, 0.7, 0.3, 0.8}));
    CHECK(f.max_flow == 0.3);
    CHECK(f.value == 0.3);
    for (VertexId v = 1; v <= 5; ++v)
        CHECK(f.theta[v] == 0.3);

    // Two paths, one blocked at the root.
    const Tree two = build_from_edge_list(std::vector<std::pair<VertexId, VertexId>>{{0, 1}, {0, 2}, {1, 3}, {2, 4}});
    const auto g = tree_flow(two, EdgeWeighting({0, 0.0, 2.0, 5.0, 5.0}));
    CHECK(g.max_flow == 2.0);
    CHECK(g.value == 1.0);
    CHECK(g.theta[1] == 0.0);
    CHECK(g.theta[2] == 1.0);
    CHECK(g.theta[4] == 1.0);

    const Tree poly = build_polynomial(3.0, 10);
    const auto h = tree_flow(poly, EdgeWeighting::depth_power(poly, 1.5));
    CHECK(h.max_flow > 0);
    CHECK(flow_conservation_error(poly, h) <= 1e-14);
    for (VertexId v = 1; v < poly.size(); ++v)
        CHECK(h.theta[v] <= std::pow(poly.depth(v), -1.5) * (1 + 1e-15));
}

TEST_CASE("flow energy stays bounded for gamma below RT") {
    const std::vector<std::uint32_t> depths{8, 16, 32};
    const auto rows = flow_energy_check(
        [](std::uint32_t L) {
            Tree t = build_polynomial(3.0, L);
            Environment env = assign_deterministic(t, [](VertexId) { return 1.0; }, [](VertexId) { return 1.0; });
            return TreeWithEnvironment{std::move(t), std::move(env)};
        },
        1.5, depths);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK_FALSE(r.degenerate);
        CHECK(r.max_flow > 0);
    }
    CHECK(rows[2].energy <= 2 * rows[1].energy);

    const Tree path = build_path(20);
    const Environment u = assign_deterministic(path, [](VertexId) { return 1.0; }, [](VertexId) { return 1.0; });
    const auto pf = flow_energy(path, u, 2.0);
    CHECK(pf.max_flow == doctest::Approx(1.0 / 400.0));
}

TEST_CASE("phase decision rule") {
    BinomialEstimate hi{400, 1000}, lo{10, 1000}, zero{0, 1000};
    CHECK(classify_phase(hi, lo) == Verdict::TransientLeaning);
    CHECK(classify_phase(lo, lo) == Verdict::RecurrentLeaning);
    CHECK(classify_phase(zero, zero) == Verdict::RecurrentLeaning);
    BinomialEstimate mid{40, 1000};  // 0.04: above control but below 0.05
    CHECK(classify_phase(mid, zero) == Verdict::Inconclusive);
}

TEST_CASE("phase diagnostic") {
    const auto fam = polynomial_phase_family(1.5, 24);
    const auto ctl = polynomial_phase_family(0.25, 24);
    CHECK(fam.br_r == 1.5);
    try {
        phase_diagnostic(fam, ctl, AlphaDistribution::point(1.0), 0.1, 16, 10000, 100, 1);
        FAIL("expected a refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NearCritical);
    }
    const auto v = phase_diagnostic(fam, ctl, AlphaDistribution::point(0.0), 0.1, 16, 100000, 400, 1);
    CHECK(v.threshold == 1.0);
    CHECK(v.escape.trials == 400);
    CHECK(v.verdict == Verdict::TransientLeaning);
}
