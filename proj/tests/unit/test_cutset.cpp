#include "doctest.h"

#include <algorithm>
#include <limits>
#include <vector>

#include "goerw/cutset.hpp"
#include "goerw/error.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

using namespace goerw;

namespace {

Tree random_small_tree(SplitMix64& rng, std::size_t max_edges) {
    std::vector<VertexId> parents{kNoVertex};
    const std::size_t n = 1 + 1 + rng() % max_edges;
    for (VertexId v = 1; v < n; ++v)
        parents.push_back(static_cast<VertexId>(rng() % v));
    return Tree::from_parents(parents);
}

}  // namespace

TEST_CASE("path: the cheapest edge") {
    const Tree t = build_path(4);
    const EdgeWeighting w({0, 5, 3, 4, 7});
    const auto r = min_cutset_sum(t, w);
    CHECK(r.value == 3);
    CHECK(r.cutset == Cutset{2});
    CHECK(is_cutset(t, r.cutset));
    CHECK_FALSE(is_cutset(t, {1, 2}));
}

TEST_CASE("ties prefer the shallower cut") {
    const Tree t = build_regular(3, 2);  // 1,2,3 under the root, two children each
    const EdgeWeighting w({0, 2, 2, 2, 1, 1, 1, 1, 1, 1});
    const auto r = min_cutset_sum(t, w);
    CHECK(r.value == 6);
    CHECK(r.cutset == Cutset{1, 2, 3});
}

TEST_CASE("dynamic program matches enumeration") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const Tree t = random_small_tree(rng, 12);
        std::vector<double> w(t.size(), 0.0);
        for (VertexId v = 1; v < t.size(); ++v)
            w[v] = static_cast<double>(rng() % 64) / 64.0;
        const EdgeWeighting ew(w);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : enumerate_cutsets(t)) {
            REQUIRE(is_cutset(t, c));
            best = std::min(best, cutset_weight(c, ew));
        }
        const auto r = min_cutset_sum(t, ew);
        CHECK(r.value == best);
        CHECK(cutset_weight(r.cutset, ew) == r.value);
    }
}

TEST_CASE("enumeration refuses large trees") {
    CHECK_THROWS_AS(enumerate_cutsets(build_path(21)), Error);
}

TEST_CASE("level recursion matches the tree pass on polynomial trees") {
    for (double b : {0.5, 1.5, 3.0})
        for (double gamma : {b - 0.3, b + 0.5}) {
            const std::uint32_t L = 12;
            const Tree t = build_polynomial(b, L);
            const auto sizes = polynomial_level_sizes(b, L);
            std::vector<double> lw(L + 1, 0.0);
            for (std::uint32_t n = 1; n <= L; ++n)
                lw[n] = std::pow(static_cast<double>(n), -gamma);
            const auto lv = min_cutset_sum_levels(sizes, lw);
            const auto tr = min_cutset_sum(t, EdgeWeighting::depth_power(t, gamma));
            CHECK(lv.value == doctest::Approx(tr.value).epsilon(1e-12));
        }
}

TEST_CASE("trend estimate") {
    const std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
    const std::vector<std::uint32_t> depths{4, 8, 12};
    const auto est = branching_ruin_estimate([](std::uint32_t L) { return build_regular(3, L); }, grid, 0.1, depths);
    // Exponential growth: every polynomial weight stays bounded below.
    CHECK(est.estimate == 2.0);
    CHECK(est.table.size() == grid.size() * depths.size());

    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(branching_ruin_estimate([](std::uint32_t L) { return build_path(L); }, unsorted, 0.1, depths),
                    Error);
}
