#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/percolation.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

namespace {

Environment unit_env(const Tree& t) {
    return assign_deterministic(t, [](VertexId) { return 1.0; }, [](VertexId) { return 1.0; });
}

}  // namespace

TEST_CASE("depth-one edges are open and the cluster is upward closed") {
    const Tree t = build_regular(3, 4);
    const Environment env = sample_random_environment(t, AlphaDistribution::point(1.0), 0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto p = sample_ruin_percolation(t, env, s);
        CHECK(p.valid);
        for (VertexId v : t.level(1))
            CHECK(p.open[v] == 1);
        for (VertexId v = 1; v < t.size(); ++v) {
            const VertexId u = t.parent(v);
            if (p.in_cluster[v] && u != 0)
                CHECK(p.in_cluster[u] == 1);
            // Closure: in the cluster iff every edge up to the root is open.
            bool all_open = true;
            for (VertexId z = v; z != 0; z = t.parent(z))
                all_open = all_open && p.open[z];
            CHECK(bool(p.in_cluster[v]) == all_open);
        }
    }
}

TEST_CASE("probe agrees with full samples") {
    const Tree t = build_regular(3, 4);
    const Environment env = sample_random_environment(t, AlphaDistribution::two_point(0, 3, 0.5), 8);
    ClusterProbe probe(t, env);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto full = sample_ruin_percolation(t, env, derive_seed(5, i));
        probe.reset(derive_seed(5, i));
        for (VertexId v = t.size() - 1; v >= 1; --v) {
            CHECK(probe.in_cluster(v) == bool(full.in_cluster[v]));
            CHECK(probe.open(v) == bool(full.open[v]));
        }
    }
}

TEST_CASE("connection probability on the symmetric path") {
    const Tree t = build_path(6);
    const Environment env = unit_env(t);
    const auto est = edge_connection_probability_mc(t, env, 4, 20000, 3);
    CHECK(est.within(0.25, 3.0));
    const auto one = edge_connection_probability_mc(t, env, 1, 100, 3);
    CHECK(one.estimate() == 1.0);
    CHECK_THROWS_AS(edge_connection_probability_mc(t, env, 4, 10, 3), Error);
}

TEST_CASE("connection probability with alpha = 1 on the ternary tree") {
    const Tree t = build_regular(3, 3);
    const Environment env = sample_random_environment(t, AlphaDistribution::point(1.0), 0);
    const VertexId e = t.level(3).front();
    CHECK(edge_connection_probability_mc(t, env, e, 20000, 9).within(0.125, 3.0));
}

TEST_CASE("adapted conductance") {
    const Tree t = build_regular(3, 5);
    const Environment u = unit_env(t);
    for (VertexId v = 1; v < t.size(); ++v)
        CHECK(adapted_conductance(t, u, v) == doctest::Approx(1.0));
    const Environment a = sample_random_environment(t, AlphaDistribution::point(1.0), 0);
    CHECK(adapted_conductance(t, a, t.level(3).front()) == doctest::Approx(0.25));
    for (VertexId v : t.level(4)) {
        const double c = adapted_conductance(t, a, v);
        CHECK(c * (1 - psi(t, a, v)) == doctest::Approx(Psi(t, a, v)).epsilon(1e-12));
    }
}

TEST_CASE("quasi-independence") {
    const Tree t = build_regular(3, 4);
    const Environment env = unit_env(t);
    // Edges below different children of the root.
    const VertexId a = t.level(2).front();
    const VertexId b = t.level(2).back();
    const auto r = quasi_independence_statistic(t, env, a, b, 20000, 4);
    CHECK(r.conditioning_edge == kNoVertex);
    CHECK(r.K == 3.0);
    CHECK(r.M == doctest::Approx(16 * std::exp(6.0)));
    CHECK(std::abs(r.ratio - 1.0) <= 3 * r.ratio_se);
    CHECK(r.bound_holds);

    const auto sib = quasi_independence_statistic(t, env, t.level(2)[0], t.level(2)[1], 20000, 4);
    CHECK(sib.conditioning_edge == t.level(1)[0]);
    CHECK(sib.conditioning_hits == 20000);
    CHECK(sib.bound_holds);

    const Tree deep = build_path(200);
    CHECK_THROWS_AS(quasi_independence_statistic(deep, unit_env(deep), 199, 200, 1000, 1), Error);
}

TEST_CASE("concentration experiment") {
    const Tree path = build_path(128);
    const std::vector<std::uint32_t> depths{8, 16, 32, 64, 128};
    // Deterministic environment: Psi is fixed, so every row is 0 or 1.
    const auto det = concentration_experiment(path, AlphaDistribution::point(1.0), 0.3, depths, 20, 1);
    for (const auto& row : det)
        CHECK((row.failures == 0 || row.failures == row.samples));
    CHECK(det.back().failures == 0);
    // Wide band: always holds.
    const auto wide = concentration_experiment(path, AlphaDistribution::two_point(0, 3, 0.5), 5.0, depths, 50, 1);
    for (const auto& row : wide)
        CHECK(row.failures == 0);
    CHECK(nonincreasing_within_noise(wide, 2.0));
    CHECK(concentration_event_holds(0.03, 10, 0.5, 1.0, 0.3));
}

TEST_CASE("csv dump") {
    const Tree t = build_path(2);
    const auto s = sample_ruin_percolation(t, unit_env(t), 1);
    std::ostringstream out;
    write_percolation_csv(out, t, std::span(&s, 1), 7);
    const std::string text = out.str();
    CHECK(text.rfind("parent,child,open,in_cluster,sample_index\n0,1,1,1,7\n", 0) == 0);
}
