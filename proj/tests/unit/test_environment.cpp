#include "doctest.h"

#include <cmath>
#include <vector>

#include "../oracle.hpp"
#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

namespace {

Environment unit_env(const Tree& t) {
    return assign_deterministic(t, [](VertexId) { return 1.0; }, [](VertexId) { return 1.0; });
}

double oracle_Psi(const Tree& t, const Environment& env, VertexId v) {
    const auto path = t.path_from_root(v);
    const auto d = static_cast<std::uint32_t>(path.size() - 1);
    std::vector<double> l(d + 1), m(d + 1);
    std::vector<std::uint32_t> deg(d + 1);
    for (std::uint32_t k = 0; k <= d; ++k) {
        l[k] = env.lambda(path[k]);
        m[k] = env.mu(path[k]);
        deg[k] = t.degree(path[k]);
    }
    return oracle::extension_success(l, m, deg, d);
}

}  // namespace

TEST_CASE("alpha distributions") {
    CHECK(AlphaDistribution::point(1.0).m() == 0.5);
    const auto two = AlphaDistribution::two_point(0.0, 3.0, 0.5);
    CHECK(two.m() == doctest::Approx(0.5 * 1.0 + 0.5 * 0.25));
    CHECK(two.max_value() == 3.0);
    CHECK(AlphaDistribution::parse(two.spec()).m() == two.m());
    CHECK(AlphaDistribution::parse("discrete=0:0.25,1:0.75").m() == doctest::Approx(0.25 + 0.375));
    CHECK_THROWS_AS(AlphaDistribution::parse("point=-1"), Error);
    CHECK_THROWS_AS(AlphaDistribution::two_point(0, 1, 1.5), Error);
}

TEST_CASE("symmetric environment gives 1/|e|") {
    const Tree t = build_regular(3, 6);
    const Environment env = unit_env(t);
    const RuinProfile prof(t, env);
    for (VertexId v = 1; v < t.size(); ++v) {
        const double n = t.depth(v);
        CHECK(Psi(t, env, v) == doctest::Approx(1.0 / n).epsilon(1e-13));
        CHECK(prof.Psi(v) == doctest::Approx(1.0 / n).epsilon(1e-13));
        CHECK(prof.adapted_conductance(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("alpha = 1 on the ternary tree") {
    const Tree t = build_regular(3, 4);
    const auto dist = AlphaDistribution::point(1.0);
    const Environment env = sample_random_environment(t, dist, 1);
    const VertexId e3 = t.level(3).front();
    CHECK(env.lambda(e3) == 4.0);
    CHECK(psi(t, env, e3) == doctest::Approx(0.5));
    CHECK(Psi(t, env, e3) == doctest::Approx(0.125));
    CHECK(RuinProfile(t, env).adapted_conductance(e3) == doctest::Approx(0.25));
}

TEST_CASE("potentials agree with the path-chain oracle") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Tree t = build_regular(2 + static_cast<std::uint32_t>(rng() % 3), 6);
        const Environment env = assign_deterministic(
            t, [&](VertexId) { return 0.2 + 5.0 * rng.uniform(); }, [&](VertexId) { return 0.2 + 3.0 * rng.uniform(); });
        const RuinProfile prof(t, env);
        for (VertexId v = 1; v < t.size(); ++v) {
            const double want = oracle_Psi(t, env, v);
            CHECK(Psi(t, env, v) == doctest::Approx(want).epsilon(1e-11));
            CHECK(prof.Psi(v) == doctest::Approx(want).epsilon(1e-11));
            CHECK(prof.phi(v) == doctest::Approx(phi(t, env, v)).epsilon(1e-13));
            CHECK(prof.resistance(v) == doctest::Approx(resistance(t, env, v)).epsilon(1e-13));
        }
    }
}

TEST_CASE("simplified psi matches the general formula") {
    SplitMix64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const double a = 5.0 * rng.uniform();
        const std::uint32_t d = 2 + static_cast<std::uint32_t>(rng() % 4);
        const Tree t = build_regular(d, 2 + static_cast<std::uint32_t>(rng() % 8));
        std::vector<double> alpha(t.size(), a);
        const Environment env = environment_from_alpha(t, alpha, AlphaDistribution::point(a));
        const VertexId u = t.level(t.truncation_depth()).front();
        CHECK(psi(t, env, u) == doctest::Approx(psi_oerw_closed_form(a, t.depth(u))).epsilon(1e-12));
    }
}

TEST_CASE("random environments are keyed by vertex") {
    const auto dist = AlphaDistribution::two_point(0.0, 3.0, 0.5);
    const Tree small = build_regular(3, 3);
    const Tree big = build_regular(3, 5);
    const Environment a = sample_random_environment(small, dist, 42);
    const Environment b = sample_random_environment(big, dist, 42);
    for (VertexId v = 1; v < small.size(); ++v)
        CHECK(a.alpha(v) == b.alpha(v));
    CHECK(a.is_oerw());
    CHECK(a.m() == dist.m());
    for (VertexId v = 1; v < small.size(); ++v)
        if (!small.is_truncation_leaf(v))
            CHECK(a.lambda(v) == 1.0 + a.alpha(v) * small.degree(v));
}

TEST_CASE("validation names the vertex") {
    const Tree t = build_path(3);
    try {
        assign_deterministic(t, [](VertexId v) { return v == 2 ? -1.0 : 1.0; }, [](VertexId) { return 1.0; });
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("vertex 2") != std::string::npos);
    }
}

TEST_CASE("quasi-independence constants for mu = 1") {
    const Tree t = build_regular(3, 5);
    const auto c = quasi_independence_constants(t, unit_env(t));
    CHECK(c.K == 3.0);
    CHECK(c.M == doctest::Approx(16.0 * std::exp(6.0)));
    const auto shallow = build_path(1);
    CHECK(rt_hypothesis_sup(shallow, unit_env(shallow)) == 0.0);
}

TEST_CASE("rt estimate on the symmetric environment follows br_r") {
    const std::vector<double> grid{0.5, 0.8, 2.0};
    const std::vector<std::uint32_t> depths{8, 16, 32};
    // Psi = 1/|e| so RT coincides with br_r = 1 on polynomial b = 1 trees.
    const auto est = rt_estimate(
        [](std::uint32_t L) {
            Tree t = build_polynomial(1.0, L);
            Environment env = unit_env(t);
            return TreeWithEnvironment{std::move(t), std::move(env)};
        },
        grid, 0.1, depths);
    CHECK(est.estimate == 0.8);
}
