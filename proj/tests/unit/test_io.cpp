#include "doctest.h"

#include <sstream>

#include "goerw/error.hpp"
#include "goerw/io.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

TEST_CASE("tree round trip") {
    const Tree t = build_polynomial(1.5, 10);
    std::stringstream ss;
    write_tree(ss, t);
    CHECK(ss.str().rfind("# goerw-tree v1 depth=10\n0 1\n", 0) == 0);
    const Tree back = read_tree(ss);
    CHECK(back.edges_bfs() == t.edges_bfs());
    CHECK(back.truncation_depth() == 10);
}

TEST_CASE("tree file errors") {
    std::istringstream bad_header("# other v1\n0 1\n");
    CHECK_THROWS_AS(read_tree(bad_header), Error);
    std::istringstream bad_depth("# goerw-tree v1 depth=3\n0 1\n");
    CHECK_THROWS_AS(read_tree(bad_depth), Error);
    std::istringstream bad_line("# goerw-tree v1 depth=1\n0 x\n");
    CHECK_THROWS_AS(read_tree(bad_line), Error);
}

TEST_CASE("environment round trip") {
    const Tree t = build_regular(3, 4);
    const auto dist = AlphaDistribution::two_point(0.0, 3.0, 0.5);
    const Environment env = sample_random_environment(t, dist, 12);
    std::stringstream ss;
    write_environment(ss, env);
    CHECK(ss.str().rfind("# goerw-env v1 seed=12 dist=two=0,3,0.5 m=0.625\n", 0) == 0);
    const Environment back = read_environment(ss, t);
    for (VertexId v = 0; v < t.size(); ++v) {
        CHECK(back.lambda(v) == env.lambda(v));
        CHECK(back.mu(v) == env.mu(v));
        CHECK(back.alpha(v) == env.alpha(v));
    }
    CHECK(back.seed() == env.seed());

    const Environment plain = assign_deterministic(t, [](VertexId v) { return 1.0 + v; }, [](VertexId) { return 2.0; });
    std::stringstream ps;
    write_environment(ps, plain);
    const Environment pb = read_environment(ps, t);
    CHECK(pb.lambda(5) == 6.0);
    CHECK(pb.mu(5) == 2.0);

    std::istringstream missing("# goerw-env v1 seed=- dist=- m=-\n0 1 1\n");
    CHECK_THROWS_AS(read_environment(missing, t), Error);
}

TEST_CASE("trajectory dumps") {
    const Tree t = build_path(3);
    StopRule stop;
    stop.hit_depth = 3;
    const auto w = simulate(t, sample_random_environment(t, AlphaDistribution::point(0), 0), stop, 1);
    std::ostringstream a, b;
    write_trajectory(a, w);
    write_trajectory_summary(b, 1, w);
    CHECK(a.str().rfind("0\n1\n", 0) == 0);
    CHECK(b.str() == "1," + std::to_string(w.steps) + "," + std::to_string(w.returns_to_root) + ",3,1\n");
}
