#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "goerw/error.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

namespace {

ErrorKind kind_of(const std::vector<std::pair<VertexId, VertexId>>& edges) {
    try {
        build_from_edge_list(edges);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

// 2^k <= n^b < 2^(k+1), found by stepping k rather than taking a logarithm.
double expected_level(double b, std::uint32_t n) {
    const double x = std::pow(static_cast<double>(n), b);
    double s = 1.0;
    while (s * 2.0 <= x * (1.0 + 1e-12))
        s *= 2.0;
    return s;
}

}  // namespace

TEST_CASE("path and regular trees") {
    const Tree p = build_path(5);
    CHECK(p.size() == 6);
    CHECK(p.truncation_depth() == 5);
    CHECK(p.degree(0) == 1);
    CHECK(p.degree(3) == 2);
    CHECK(p.is_truncation_leaf(5));

    const Tree t = build_regular(3, 5);
    CHECK(t.level_sizes() == std::vector<std::size_t>{1, 3, 6, 12, 24, 48});
    for (VertexId v = 1; v < t.size(); ++v)
        if (!t.is_truncation_leaf(v))
            CHECK(t.degree(v) == 3);
    CHECK(t.is_spherically_symmetric());
}

TEST_CASE("polynomial level sizes") {
    for (double b : {0.5, 1.0, 1.5, 3.0}) {
        const std::uint32_t L = b > 2 ? 12 : 40;
        const Tree t = build_polynomial(b, L);
        const auto sizes = t.level_sizes();
        const auto levels = polynomial_level_sizes(b, L);
        CHECK(sizes[0] == 1);
        for (std::uint32_t n = 1; n <= L; ++n) {
            CHECK(static_cast<double>(sizes[n]) == expected_level(b, n));
            CHECK(levels[n] == static_cast<double>(sizes[n]));
        }
        CHECK(t.is_spherically_symmetric());
    }
    CHECK(build_polynomial(1.0, 8).level_sizes()[8] == 8);
    // Tiny exponents give a path.
    CHECK(build_polynomial(0.01, 64).size() == 65);
}

TEST_CASE("galton-watson trees survive to depth L and are reproducible") {
    const std::vector<double> pmf{0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3};
    const Tree a = build_galton_watson(pmf, 5, 11);
    const Tree b = build_galton_watson(pmf, 5, 11);
    CHECK(a.truncation_depth() == 5);
    CHECK(a.edges_bfs() == b.edges_bfs());

    const std::vector<double> subcritical{0.6, 0.2, 0.2};
    const Tree c = build_galton_watson(subcritical, 6, 3);
    CHECK(c.truncation_depth() == 6);
}

TEST_CASE("paths and ancestors") {
    const Tree t = build_regular(3, 3);
    const auto leaves = t.level(3);
    const auto path = t.path_from_root(leaves[0]);
    REQUIRE(path.size() == 4);
    CHECK(path.front() == 0);
    CHECK(path.back() == leaves[0]);
    CHECK(t.common_ancestor(leaves[0], leaves[1]) == t.parent(leaves[0]));
    CHECK(t.common_ancestor(leaves.front(), leaves.back()) == 0);
}

TEST_CASE("edge list validation") {
    using E = std::vector<std::pair<VertexId, VertexId>>;
    CHECK(kind_of(E{}) == ErrorKind::MissingRoot);
    CHECK(kind_of(E{{1, 2}}) == ErrorKind::MissingRoot);
    CHECK(kind_of(E{{0, 1}, {1, 1}}) == ErrorKind::Cycle);
    CHECK(kind_of(E{{0, 1}, {1, 0}}) == ErrorKind::Cycle);
    CHECK(kind_of(E{{0, 1}, {0, 1}}) == ErrorKind::DuplicateChild);
    CHECK(kind_of(E{{0, 1}, {0, 3}}) == ErrorKind::NonDenseIds);
    CHECK(kind_of(E{{0, 1}, {2, 3}, {3, 2}}) == ErrorKind::Cycle);

    const Tree t = build_from_edge_list(E{{0, 1}, {0, 2}, {1, 3}});
    CHECK(t.truncation_depth() == 2);
    CHECK(t.children(0).size() == 2);
}
