#include "goerw/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "goerw/error.hpp"
#include "goerw/format.hpp"
#include "goerw/rng.hpp"

namespace goerw {

namespace {

// floor(b * log2 n) with a small guard so that exact products like 1.2 * 5
// do not land a hair under an integer.
std::int64_t poly_exponent(double b, std::uint32_t n) {
    if (n == 0)
        return 0;
    return static_cast<std::int64_t>(std::floor(b * std::log2(static_cast<double>(n)) + 1e-9));
}

}  // namespace

Tree Tree::from_parents(std::vector<VertexId> parents) {
    std::vector<std::vector<VertexId>> order(parents.size());
    for (VertexId v = 1; v < parents.size(); ++v)
        order[parents[v]].push_back(v);
    return from_parents(std::move(parents), order);
}

Tree Tree::from_parents(std::vector<VertexId> parents,
                        const std::vector<std::vector<VertexId>>& child_order) {
    Tree t;
    const std::size_t n = parents.size();
    require(n >= 1, "tree must contain the root");
    t.parent_ = std::move(parents);

    t.child_begin_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v)
        t.child_begin_[v + 1] = t.child_begin_[v] + static_cast<std::uint32_t>(child_order[v].size());
    t.child_list_.reserve(n - 1);
    for (std::size_t v = 0; v < n; ++v)
        t.child_list_.insert(t.child_list_.end(), child_order[v].begin(), child_order[v].end());

    // Depths by breadth-first sweep from the root.
    t.depth_.assign(n, 0);
    std::vector<VertexId> queue{root()};
    queue.reserve(n);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        for (VertexId c : t.children(v)) {
            t.depth_[c] = t.depth_[v] + 1;
            queue.push_back(c);
        }
    }
    t.truncation_depth_ = *std::max_element(t.depth_.begin(), t.depth_.end());

    t.level_begin_.assign(t.truncation_depth_ + 2, 0);
    for (std::size_t v = 0; v < n; ++v)
        ++t.level_begin_[t.depth_[v] + 1];
    std::partial_sum(t.level_begin_.begin(), t.level_begin_.end(), t.level_begin_.begin());
    t.level_list_.resize(n);
    std::vector<std::uint32_t> fill(t.level_begin_.begin(), t.level_begin_.end() - 1);
    for (VertexId v = 0; v < n; ++v)
        t.level_list_[fill[t.depth_[v]]++] = v;
    return t;
}

std::vector<std::size_t> Tree::level_sizes() const {
    std::vector<std::size_t> out(truncation_depth_ + 1);
    for (std::uint32_t n = 0; n <= truncation_depth_; ++n)
        out[n] = level_begin_[n + 1] - level_begin_[n];
    return out;
}

std::vector<VertexId> Tree::path_from_root(VertexId v) const {
    std::vector<VertexId> path(depth_[v] + 1);
    for (auto i = static_cast<std::ptrdiff_t>(depth_[v]); i >= 0; --i) {
        path[static_cast<std::size_t>(i)] = v;
        v = parent_[v];
    }
    return path;
}

VertexId Tree::common_ancestor(VertexId a, VertexId b) const {
    while (depth_[a] > depth_[b])
        a = parent_[a];
    while (depth_[b] > depth_[a])
        b = parent_[b];
    while (a != b) {
        a = parent_[a];
        b = parent_[b];
    }
    return a;
}

bool Tree::is_spherically_symmetric() const {
    for (std::uint32_t n = 0; n <= truncation_depth_; ++n) {
        const auto lv = level(n);
        const auto c0 = children(lv.front()).size();
        for (VertexId v : lv)
            if (children(v).size() != c0)
                return false;
    }
    return true;
}

std::vector<Edge> Tree::edges_bfs() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::uint32_t n = 1; n <= truncation_depth_; ++n)
        for (VertexId v : level(n))
            out.push_back({parent_[v], v});
    return out;
}

namespace {

constexpr std::size_t kMaxVertices = 50'000'000;

void guard_size(std::size_t n) {
    if (n > kMaxVertices)
        fail(ErrorKind::SizeGuard, "tree would exceed " + std::to_string(kMaxVertices) + " vertices");
}

// Breadth-first builder: children_at(depth, vertex_id) -> number of children.
template <typename ChildCount>
Tree build_bfs(std::uint32_t L, ChildCount&& children_at) {
    std::vector<VertexId> parents{kNoVertex};
    std::vector<VertexId> frontier{0};
    for (std::uint32_t depth = 0; depth < L; ++depth) {
        std::vector<VertexId> next;
        for (VertexId v : frontier) {
            const std::uint32_t k = children_at(depth, v);
            guard_size(parents.size() + k);
            for (std::uint32_t i = 0; i < k; ++i) {
                next.push_back(static_cast<VertexId>(parents.size()));
                parents.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    return Tree::from_parents(std::move(parents));
}

}  // namespace

Tree build_path(std::uint32_t L) {
    require(L >= 1, "path depth L must be >= 1");
    return build_bfs(L, [](std::uint32_t, VertexId) { return 1u; });
}

Tree build_regular(std::uint32_t d, std::uint32_t L) {
    require(d >= 2, "regular tree degree d must be >= 2");
    require(L >= 1, "regular tree depth L must be >= 1");
    return build_bfs(L, [d](std::uint32_t depth, VertexId) { return depth == 0 ? d : d - 1; });
}

std::uint32_t polynomial_branching(double b, std::uint32_t n) {
    if (n == 0)
        return 1;
    const auto inc = poly_exponent(b, n + 1) - poly_exponent(b, n);
    return static_cast<std::uint32_t>(std::int64_t{1} << inc);
}

std::vector<double> polynomial_level_sizes(double b, std::uint32_t L) {
    require(b > 0.0, "polynomial growth exponent b must be > 0");
    require(L >= 1, "polynomial tree depth L must be >= 1");
    std::vector<double> sizes(L + 1);
    sizes[0] = 1.0;
    for (std::uint32_t n = 1; n <= L; ++n)
        sizes[n] = std::ldexp(1.0, static_cast<int>(poly_exponent(b, n)));
    return sizes;
}

Tree build_polynomial(double b, std::uint32_t L) {
    require(b > 0.0, "polynomial growth exponent b must be > 0");
    require(L >= 1, "polynomial tree depth L must be >= 1");
    const auto sizes = polynomial_level_sizes(b, L);
    if (std::accumulate(sizes.begin(), sizes.end(), 0.0) > static_cast<double>(kMaxVertices))
        fail(ErrorKind::SizeGuard, "polynomial tree b=" + format_double(b) + ", L=" + std::to_string(L) +
                                       " is too large to materialize; use the level-size profile");
    return build_bfs(L, [b](std::uint32_t depth, VertexId) { return polynomial_branching(b, depth); });
}

Tree build_galton_watson(std::span<const double> offspring_pmf, std::uint32_t L, std::uint64_t seed) {
    require(L >= 1, "Galton-Watson depth L must be >= 1");
    require(!offspring_pmf.empty(), "offspring distribution must be non-empty");
    double total = 0.0;
    for (double p : offspring_pmf) {
        require(p >= 0.0, "offspring probabilities must be >= 0");
        total += p;
    }
    require(std::abs(total - 1.0) < 1e-9, "offspring probabilities must sum to 1");
    require(offspring_pmf.size() > 1 && offspring_pmf[0] < 1.0, "offspring distribution is degenerate at 0");

    // Condition on survival to depth L by redrawing with the next derived seed.
    for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
        SplitMix64 rng(derive_seed(seed, attempt));
        Tree t = build_bfs(L, [&](std::uint32_t, VertexId) {
            double u = rng.uniform();
            std::uint32_t k = 0;
            while (k + 1 < offspring_pmf.size() && u >= offspring_pmf[k]) {
                u -= offspring_pmf[k];
                ++k;
            }
            return k;
        });
        if (t.truncation_depth() == L)
            return t;
    }
    fail(ErrorKind::InvalidArgument, "Galton-Watson tree never survived to depth " + std::to_string(L));
}

Tree build_from_edge_list(std::span<const std::pair<VertexId, VertexId>> edges) {
    if (edges.empty())
        fail(ErrorKind::MissingRoot, "edge list is empty; tree needs root 0 and at least one edge");
    VertexId max_id = 0;
    for (const auto& [p, c] : edges)
        max_id = std::max({max_id, p, c});
    const std::size_t n = static_cast<std::size_t>(max_id) + 1;

    std::vector<VertexId> parents(n, kNoVertex);
    std::vector<bool> seen(n, false);
    std::vector<std::vector<VertexId>> order(n);
    for (const auto& [p, c] : edges) {
        if (p == c)
            fail(ErrorKind::Cycle, "self-loop at vertex " + std::to_string(p));
        if (c == 0)
            fail(ErrorKind::Cycle, "edge (" + std::to_string(p) + ", 0) points into the root");
        if (parents[c] != kNoVertex) {
            if (parents[c] == p)
                fail(ErrorKind::DuplicateChild, "duplicate edge (" + std::to_string(p) + ", " + std::to_string(c) + ")");
            fail(ErrorKind::DuplicateChild, "vertex " + std::to_string(c) + " has two parents");
        }
        parents[c] = p;
        order[p].push_back(c);
        seen[p] = seen[c] = true;
    }
    if (!seen[0])
        fail(ErrorKind::MissingRoot, "root vertex 0 does not appear in the edge list");
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v])
            fail(ErrorKind::NonDenseIds, "vertex ids must be dense 0..n-1; id " + std::to_string(v) + " is missing");

    // Every vertex must reach the root through parent links without repeating.
    std::vector<std::uint8_t> state(n, 0);  // 0 unvisited, 1 on stack, 2 rooted
    state[0] = 2;
    for (VertexId start = 1; start < n; ++start) {
        std::vector<VertexId> chain;
        VertexId v = start;
        while (state[v] == 0) {
            state[v] = 1;
            chain.push_back(v);
            v = parents[v];
            if (v == kNoVertex)
                fail(ErrorKind::Disconnected, "vertex " + std::to_string(chain.back()) +
                                                  " is not connected to the root");
        }
        if (state[v] == 1)
            fail(ErrorKind::Cycle, "cycle through vertex " + std::to_string(v));
        for (VertexId u : chain)
            state[u] = 2;
    }
    return Tree::from_parents(std::move(parents), order);
}

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::Cycle: return "cycle";
        case ErrorKind::Disconnected: return "disconnected";
        case ErrorKind::DuplicateChild: return "duplicate_child";
        case ErrorKind::MissingRoot: return "missing_root";
        case ErrorKind::NonDenseIds: return "non_dense_ids";
        case ErrorKind::SizeGuard: return "size_guard";
        case ErrorKind::NearCritical: return "near_critical";
        case ErrorKind::RareEvent: return "rare_event";
        case ErrorKind::StepCap: return "step_cap";
        case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

}  // namespace goerw
