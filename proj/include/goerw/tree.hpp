#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace goerw {

using VertexId = std::uint32_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

/// An edge {v^-1, v}. Every non-root vertex owns exactly one parent edge, so
/// edges are addressed by their child endpoint throughout the library.
struct Edge {
    VertexId parent = kNoVertex;
    VertexId child = kNoVertex;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Rooted, locally finite tree truncated at depth L. Vertices at depth L are
/// truncation leaves: they stand for "the tree continues". A childless vertex
/// shallower than L is a genuine dead end.
///
/// Immutable after construction; safe to share between threads.
class Tree {
public:
    Tree() = default;

    /// `parents[v]` for v = 0..n-1, with parents[0] == kNoVertex. Children keep
    /// the order in which they appear in `parents` unless `child_order` is given.
    static Tree from_parents(std::vector<VertexId> parents);
    static Tree from_parents(std::vector<VertexId> parents,
                             const std::vector<std::vector<VertexId>>& child_order);

    std::size_t size() const noexcept { return parent_.size(); }
    std::size_t edge_count() const noexcept { return size() == 0 ? 0 : size() - 1; }
    static constexpr VertexId root() noexcept { return 0; }

    VertexId parent(VertexId v) const { return parent_[v]; }
    std::span<const VertexId> children(VertexId v) const {
        return {child_list_.data() + child_begin_[v], child_list_.data() + child_begin_[v + 1]};
    }
    std::uint32_t depth(VertexId v) const { return depth_[v]; }
    std::uint32_t truncation_depth() const noexcept { return truncation_depth_; }

    /// deg(v) = |children| + 1 off the root, |children| at the root.
    std::uint32_t degree(VertexId v) const {
        const auto c = child_begin_[v + 1] - child_begin_[v];
        return v == root() ? c : c + 1;
    }
    bool is_truncation_leaf(VertexId v) const { return depth_[v] == truncation_depth_; }

    /// Vertices at depth n in increasing id order.
    std::span<const VertexId> level(std::uint32_t n) const {
        return {level_list_.data() + level_begin_[n], level_list_.data() + level_begin_[n + 1]};
    }
    std::vector<std::size_t> level_sizes() const;

    /// Vertices of P_v from the root to v inclusive.
    std::vector<VertexId> path_from_root(VertexId v) const;

    /// Nearest common ancestor.
    VertexId common_ancestor(VertexId a, VertexId b) const;

    /// True when every vertex at a given depth has the same number of children.
    bool is_spherically_symmetric() const;

    std::vector<Edge> edges_bfs() const;

private:
    std::vector<VertexId> parent_;
    std::vector<std::uint32_t> child_begin_;
    std::vector<VertexId> child_list_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::uint32_t> level_begin_;
    std::vector<VertexId> level_list_;
    std::uint32_t truncation_depth_ = 0;
};

Tree build_path(std::uint32_t L);

/// Root has d children, every other internal vertex d-1, truncated at depth L.
Tree build_regular(std::uint32_t d, std::uint32_t L);

/// Level sizes s(n) = 2^floor(b log2 n) for 1 <= n <= L. The root has one
/// child; a vertex at depth n >= 1 has 2^(floor(b log2(n+1)) - floor(b log2 n))
/// children.
Tree build_polynomial(double b, std::uint32_t L);

/// The level-size sequence of build_polynomial without materializing the tree.
/// Entry 0 is the root level (size 1).
std::vector<double> polynomial_level_sizes(double b, std::uint32_t L);

/// Children per vertex at depth n for the polynomial family.
std::uint32_t polynomial_branching(double b, std::uint32_t n);

/// Galton-Watson tree truncated at L: each vertex draws its number of children
/// from `offspring_pmf` (index = count). Ids are breadth-first.
Tree build_galton_watson(std::span<const double> offspring_pmf, std::uint32_t L, std::uint64_t seed);

/// Validates and builds from (parent, child) pairs. Ids must be dense 0..n-1 with
/// root 0; child order is order of appearance.
Tree build_from_edge_list(std::span<const std::pair<VertexId, VertexId>> edges);

}  // namespace goerw
