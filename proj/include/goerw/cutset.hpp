#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "goerw/tree.hpp"

namespace goerw {

/// Nonnegative weight per edge, indexed by the child vertex id. Entry 0 (the
/// root has no parent edge) is ignored.
class EdgeWeighting {
public:
    EdgeWeighting() = default;
    explicit EdgeWeighting(std::vector<double> weights);

    /// w(e) = f(e) for every edge of `tree`.
    static EdgeWeighting from(const Tree& tree, const std::function<double(Edge)>& f);
    /// w(e) = |e|^(-gamma).
    static EdgeWeighting depth_power(const Tree& tree, double gamma);

    double operator[](VertexId child) const { return w_[child]; }
    std::size_t size() const noexcept { return w_.size(); }

private:
    std::vector<double> w_;
};

/// Edges (by child id) crossed exactly once by every root-to-truncation-leaf path.
using Cutset = std::vector<VertexId>;

struct CutsetResult {
    double value = 0.0;
    Cutset cutset;  // sorted by id
};

/// min over cutsets of sum w(e), by a leaf-to-root pass. Ties prefer the
/// shallower cut.
CutsetResult min_cutset_sum(const Tree& tree, const EdgeWeighting& w);

/// Sum of w over a cutset.
double cutset_weight(const Cutset& cutset, const EdgeWeighting& w);

/// True when `edges` is a cutset of `tree`.
bool is_cutset(const Tree& tree, const Cutset& edges);

inline constexpr std::size_t kEnumerateMaxEdges = 20;

/// Every cutset of the truncated tree. Refuses trees with more than 20 edges.
std::vector<Cutset> enumerate_cutsets(const Tree& tree);

/// Spherically symmetric trees with level-constant weights collapse to a
/// per-level recursion. `level_sizes[n]` is the number of vertices at depth n
/// (entry 0 is the root) and `level_weight[n]` the weight of each depth-n edge.
/// Returns the min cutset sum and the depth of the optimal pure-level cut.
struct LevelCutResult {
    double value = 0.0;
    std::uint32_t cut_depth = 0;
};
LevelCutResult min_cutset_sum_levels(std::span<const double> level_sizes, std::span<const double> level_weight);

struct TrendRow {
    double gamma = 0.0;
    std::uint32_t depth = 0;
    double value = 0.0;
};

struct TrendEstimate {
    /// Largest grid gamma whose value at the deepest L stays >= threshold;
    /// 0 when no grid point qualifies.
    double estimate = 0.0;
    std::vector<TrendRow> table;
};

/// `value_at(gamma, L)` returns the min cutset sum for one (gamma, L) cell.
TrendEstimate trend_estimate(const std::function<double(double, std::uint32_t)>& value_at,
                             std::span<const double> gamma_grid, double threshold,
                             std::span<const std::uint32_t> depths);

/// Estimate of br_r from a deterministic tree family, weights |e|^(-gamma).
TrendEstimate branching_ruin_estimate(const std::function<Tree(std::uint32_t)>& family,
                                      std::span<const double> gamma_grid, double threshold,
                                      std::span<const std::uint32_t> depths);

/// Same protocol for a spherically symmetric family given by level sizes.
TrendEstimate branching_ruin_estimate_levels(
    const std::function<std::vector<double>(std::uint32_t)>& level_sizes_family,
    std::span<const double> gamma_grid, double threshold, std::span<const std::uint32_t> depths);

}  // namespace goerw
