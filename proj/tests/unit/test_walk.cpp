#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"
#include "goerw/walk.hpp"

using namespace goerw;

namespace {

Environment alpha_env(const Tree& t, double a) {
    return sample_random_environment(t, AlphaDistribution::point(a), 0);
}

// Exact probabilities of every length-n trajectory from the root, by
// enumeration through the transition law.
void enumerate(const Tree& t, const Environment& env, std::vector<VertexId>& path, std::map<VertexId, std::uint32_t>& z,
               double p, std::size_t n, std::map<std::vector<VertexId>, double>& out) {
    if (path.size() == n + 1) {
        out[path] += p;
        return;
    }
    const VertexId x = path.back();
    for (auto [y, q] : transition_law(t, env, x, z[x])) {
        path.push_back(y);
        ++z[y];
        enumerate(t, env, path, z, p * q, n, out);
        --z[y];
        path.pop_back();
    }
}

}  // namespace

TEST_CASE("transition law") {
    const Tree t = build_regular(3, 3);
    const Environment env = alpha_env(t, 1.0);
    const VertexId v = t.level(1).front();
    const auto first = transition_law(t, env, v, 1);
    REQUIRE(first.size() == 3);
    CHECK(first[0].first == 0);
    CHECK(first[0].second == doctest::Approx(4.0 / 6.0));
    CHECK(first[1].second == doctest::Approx(1.0 / 6.0));
    const auto later = transition_law(t, env, v, 2);
    CHECK(later[0].second == doctest::Approx(1.0 / 3.0));
    const auto root = transition_law(t, env, 0, 1);
    CHECK(root.size() == 3);
    CHECK(root[2].second == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(transition_law(t, env, v, 0), Error);
}

TEST_CASE("clock rates") {
    const Tree t = build_path(4);
    const Environment env = assign_deterministic(t, [](VertexId v) { return 1.0 + v; }, [](VertexId v) { return 0.5 * v; });
    // r_lambda(2, 1) = 1/lambda_1, r_lambda(2, 3) = 1/(lambda_1 lambda_2)
    const auto up = rates(t, env, 2, 1);
    const auto down = rates(t, env, 2, 3);
    CHECK(up.r_lambda == doctest::Approx(1.0 / 2.0));
    CHECK(down.r_lambda == doctest::Approx(1.0 / 6.0));
    CHECK(up.r_lambda == doctest::Approx(env.lambda(2) * down.r_lambda));
    CHECK(up.r_mu == doctest::Approx(env.mu(2) * down.r_mu));
    CHECK_THROWS_AS(rates(t, env, 1, 3), Error);
}

TEST_CASE("trajectories are consistent and reproducible") {
    const Tree t = build_regular(3, 6);
    const Environment env = alpha_env(t, 1.0);
    StopRule stop;
    stop.max_steps = 5000;
    const auto a = simulate(t, env, stop, 5);
    const auto b = simulate(t, env, stop, 5);
    CHECK(a.positions == b.positions);
    CHECK(trajectory_is_consistent(t, a));
    const auto r = simulate_rubin(t, env, ClockTable(5), stop);
    CHECK(trajectory_is_consistent(t, r));
    CHECK(r.positions == simulate_rubin(t, env, ClockTable(5), stop).positions);
    CHECK(r.steps <= 5000);
    if (r.reason == StopReason::Escaped)
        CHECK(t.is_truncation_leaf(r.final_position));
}

TEST_CASE("stop rules") {
    const Tree t = build_path(10);
    const Environment env = alpha_env(t, 0.0);
    StopRule stop;
    stop.returns_to_root = 3;
    const auto w = simulate(t, env, stop, 1);
    if (w.reason == StopReason::ReturnsToRoot) {
        CHECK(w.returns_to_root == 3);
        CHECK(w.final_position == 0);
        CHECK(w.first_return.has_value());
    }
    StopRule zero;
    zero.max_steps = 0;
    CHECK(simulate(t, env, zero, 1).steps == 0);
    StopRule depth;
    depth.hit_depth = 4;
    const auto d = simulate(t, env, depth, 2);
    CHECK(d.reason == StopReason::HitDepth);
    CHECK(d.final_position == 4);
    CHECK_FALSE(d.escaped);
    StopRule cap;
    cap.step_cap = 7;
    const Tree deep = build_regular(3, 12);
    const auto c = simulate(deep, alpha_env(deep, 0.0), cap, 3);
    CHECK(c.truncated);
    CHECK(c.reason == StopReason::StepCap);
    CHECK(c.steps == 7);
}

TEST_CASE("Rubin's construction has the walk's law") {
    const Tree t = build_regular(3, 5);  // deep enough that no 4-step path escapes
    const Environment env = assign_deterministic(t, [](VertexId v) { return 1.0 + 0.7 * (v % 5); },
                                                 [](VertexId v) { return 0.4 + 0.3 * (v % 3); });
    const std::size_t n = 4;
    std::map<std::vector<VertexId>, double> exact;
    std::vector<VertexId> path{0};
    std::map<VertexId, std::uint32_t> z{{0, 1}};
    enumerate(t, env, path, z, 1.0, n, exact);
    double total = 0.0;
    for (auto& [k, p] : exact)
        total += p;
    CHECK(total == doctest::Approx(1.0));

    const int trials = 40000;
    std::map<std::vector<VertexId>, int> rubin, direct;
    StopRule stop;
    stop.max_steps = n;
    for (int i = 0; i < trials; ++i) {
        ++rubin[simulate_rubin(t, env, ClockTable(derive_seed(1, i)), stop).positions];
        ++direct[simulate(t, env, stop, derive_seed(2, i)).positions];
    }
    for (auto& [traj, p] : exact) {
        const double se = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(rubin[traj] / double(trials) - p) <= 5 * se + 1e-12);
        CHECK(std::abs(direct[traj] / double(trials) - p) <= 5 * se + 1e-12);
    }
}

TEST_CASE("extension reflects at its target and stays on the path") {
    const Tree t = build_regular(3, 5);
    const Environment env = alpha_env(t, 1.0);
    const VertexId v = t.level(4).back();
    const auto mask = path_mask(t, v);
    StopRule stop;
    stop.max_steps = 2000;
    stop.returns_to_root = 50;
    const auto x = simulate_extension(t, env, v, ClockTable(3), stop);
    CHECK(trajectory_is_consistent(t, x));
    for (std::size_t i = 0; i < x.positions.size(); ++i) {
        CHECK(mask[x.positions[i]]);
        if (x.positions[i] == v && i + 1 < x.positions.size())
            CHECK(x.positions[i + 1] == t.parent(v));
    }
    CHECK_THROWS_AS(simulate_extension(t, env, 0, ClockTable(3), stop), Error);
}

TEST_CASE("restriction to a path coincides with the extension") {
    const std::vector<double> pmf{0.0, 0.3, 0.4, 0.3};
    int compared = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Tree t = build_galton_watson(pmf, 5, s);
        const Environment env = assign_deterministic(
            t, [&](VertexId v) { return 0.5 + to_unit(hash_combine(s, v)) * 4; },
            [&](VertexId v) { return 0.5 + to_unit(hash_combine(s + 1000, v)) * 2; });
        const ClockTable clocks(derive_seed(77, s));
        StopRule stop;
        stop.max_steps = 400;
        const auto walk = simulate_rubin(t, env, clocks, stop);
        for (VertexId v = 1; v < t.size(); ++v) {
            const auto r = restriction(walk.positions, path_mask(t, v));
            StopRule es;
            es.max_steps = r.killing_time;
            const auto ext = simulate_extension(t, env, v, clocks, es);
            REQUIRE(ext.positions.size() == r.positions.size());
            CHECK(ext.positions == r.positions);
            ++compared;
        }
    }
    CHECK(compared > 1000);
}

TEST_CASE("restriction collapses repeats") {
    std::vector<bool> in{true, true, false, true};
    const std::vector<VertexId> pos{0, 1, 2, 1, 0, 1, 3};
    const auto r = restriction(pos, in);
    CHECK(r.positions == std::vector<VertexId>{0, 1, 0, 1, 3});
    CHECK(r.killing_time == 4);
}
