#include "goerw/cutset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "goerw/error.hpp"

namespace goerw {

EdgeWeighting::EdgeWeighting(std::vector<double> weights) : w_(std::move(weights)) {
    for (std::size_t i = 1; i < w_.size(); ++i)
        require(std::isfinite(w_[i]) && w_[i] >= 0.0,
                "edge weight for child " + std::to_string(i) + " must be finite and >= 0");
}

EdgeWeighting EdgeWeighting::from(const Tree& tree, const std::function<double(Edge)>& f) {
    std::vector<double> w(tree.size(), 0.0);
    for (VertexId v = 1; v < tree.size(); ++v)
        w[v] = f(Edge{tree.parent(v), v});
    return EdgeWeighting(std::move(w));
}

EdgeWeighting EdgeWeighting::depth_power(const Tree& tree, double gamma) {
    std::vector<double> by_depth(tree.truncation_depth() + 1, 0.0);
    for (std::uint32_t n = 1; n < by_depth.size(); ++n)
        by_depth[n] = std::pow(static_cast<double>(n), -gamma);
    std::vector<double> w(tree.size(), 0.0);
    for (VertexId v = 1; v < tree.size(); ++v)
        w[v] = by_depth[tree.depth(v)];
    return EdgeWeighting(std::move(w));
}

namespace {

// has_leaf[v]: the subtree of v contains a truncation leaf. Edges into subtrees
// without one never need cutting.
std::vector<bool> reaches_truncation(const Tree& tree) {
    std::vector<bool> has(tree.size(), false);
    for (auto n = static_cast<std::int64_t>(tree.truncation_depth()); n >= 0; --n) {
        for (VertexId v : tree.level(static_cast<std::uint32_t>(n))) {
            if (tree.is_truncation_leaf(v)) {
                has[v] = true;
                continue;
            }
            for (VertexId c : tree.children(v))
                if (has[c]) {
                    has[v] = true;
                    break;
                }
        }
    }
    return has;
}

}  // namespace

CutsetResult min_cutset_sum(const Tree& tree, const EdgeWeighting& w) {
    require(tree.edge_count() > 0, "min_cutset_sum: tree has no edges");
    require(w.size() >= tree.size(), "min_cutset_sum: weighting does not cover every edge");

    const auto has_leaf = reaches_truncation(tree);
    std::vector<double> best(tree.size(), 0.0);
    std::vector<bool> cut_here(tree.size(), false);

    for (auto n = static_cast<std::int64_t>(tree.truncation_depth()); n >= 1; --n) {
        for (VertexId v : tree.level(static_cast<std::uint32_t>(n))) {
            if (!has_leaf[v])
                continue;
            if (tree.is_truncation_leaf(v)) {
                best[v] = w[v];
                cut_here[v] = true;
                continue;
            }
            double below = 0.0;
            for (VertexId c : tree.children(v))
                if (has_leaf[c])
                    below += best[c];
            cut_here[v] = w[v] <= below;  // ties: shallower cut
            best[v] = cut_here[v] ? w[v] : below;
        }
    }

    CutsetResult out;
    std::vector<VertexId> stack;
    for (VertexId c : tree.children(Tree::root()))
        if (has_leaf[c]) {
            out.value += best[c];
            stack.push_back(c);
        }
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        if (cut_here[v]) {
            out.cutset.push_back(v);
            continue;
        }
        for (VertexId c : tree.children(v))
            if (has_leaf[c])
                stack.push_back(c);
    }
    std::sort(out.cutset.begin(), out.cutset.end());
    return out;
}

double cutset_weight(const Cutset& cutset, const EdgeWeighting& w) {
    double s = 0.0;
    for (VertexId e : cutset)
        s += w[e];
    return s;
}

bool is_cutset(const Tree& tree, const Cutset& edges) {
    std::vector<bool> in(tree.size(), false);
    for (VertexId e : edges) {
        if (e == Tree::root() || e >= tree.size() || in[e])
            return false;
        in[e] = true;
    }
    const auto has_leaf = reaches_truncation(tree);
    for (VertexId e : edges)
        if (!has_leaf[e])
            return false;
    // crossings[v]: number of set edges on P_v.
    std::vector<std::uint32_t> crossings(tree.size(), 0);
    for (std::uint32_t n = 1; n <= tree.truncation_depth(); ++n)
        for (VertexId v : tree.level(n))
            crossings[v] = crossings[tree.parent(v)] + (in[v] ? 1u : 0u);
    for (VertexId v : tree.level(tree.truncation_depth()))
        if (crossings[v] != 1)
            return false;
    return true;
}

std::vector<Cutset> enumerate_cutsets(const Tree& tree) {
    if (tree.edge_count() > kEnumerateMaxEdges)
        fail(ErrorKind::SizeGuard, "enumerate_cutsets refuses trees with more than " +
                                       std::to_string(kEnumerateMaxEdges) + " edges (got " +
                                       std::to_string(tree.edge_count()) + ")");
    require(tree.edge_count() > 0, "enumerate_cutsets: tree has no edges");
    const auto has_leaf = reaches_truncation(tree);

    // options(v): all ways to separate v from the truncation leaves below it.
    std::function<std::vector<Cutset>(VertexId)> options = [&](VertexId v) {
        std::vector<Cutset> acc{Cutset{}};
        for (VertexId c : tree.children(v)) {
            if (!has_leaf[c])
                continue;
            std::vector<Cutset> child_opts{Cutset{c}};
            if (!tree.is_truncation_leaf(c)) {
                auto deeper = options(c);
                child_opts.insert(child_opts.end(), deeper.begin(), deeper.end());
            }
            std::vector<Cutset> next;
            next.reserve(acc.size() * child_opts.size());
            for (const auto& a : acc)
                for (const auto& b : child_opts) {
                    Cutset merged = a;
                    merged.insert(merged.end(), b.begin(), b.end());
                    next.push_back(std::move(merged));
                }
            acc = std::move(next);
        }
        return acc;
    };

    auto all = options(Tree::root());
    for (auto& c : all)
        std::sort(c.begin(), c.end());
    return all;
}

LevelCutResult min_cutset_sum_levels(std::span<const double> level_sizes, std::span<const double> level_weight) {
    require(level_sizes.size() >= 2, "level profile needs at least one edge level");
    require(level_weight.size() >= level_sizes.size(), "level weights must cover every level");
    const std::size_t L = level_sizes.size() - 1;
    // best = min over cuts at depth >= n of (level size x weight); scanning
    // upward with <= keeps the shallowest minimizer.
    LevelCutResult out{level_sizes[L] * level_weight[L], static_cast<std::uint32_t>(L)};
    for (std::size_t n = L - 1; n >= 1; --n) {
        const double here = level_sizes[n] * level_weight[n];
        if (here <= out.value)
            out = {here, static_cast<std::uint32_t>(n)};
    }
    return out;
}

TrendEstimate trend_estimate(const std::function<double(double, std::uint32_t)>& value_at,
                             std::span<const double> gamma_grid, double threshold,
                             std::span<const std::uint32_t> depths) {
    require(!gamma_grid.empty(), "gamma grid must not be empty");
    require(!depths.empty(), "depth list must not be empty");
    require(threshold > 0.0, "threshold must be > 0");
    require(std::is_sorted(gamma_grid.begin(), gamma_grid.end()), "gamma grid must be sorted ascending");
    for (double g : gamma_grid)
        require(g > 0.0, "gamma grid entries must be > 0");

    const std::uint32_t deepest = *std::max_element(depths.begin(), depths.end());
    TrendEstimate out;
    for (double g : gamma_grid) {
        double at_deepest = 0.0;
        for (std::uint32_t L : depths) {
            const double v = value_at(g, L);
            out.table.push_back({g, L, v});
            if (L == deepest)
                at_deepest = v;
        }
        if (at_deepest >= threshold)
            out.estimate = g;
    }
    return out;
}

TrendEstimate branching_ruin_estimate(const std::function<Tree(std::uint32_t)>& family,
                                      std::span<const double> gamma_grid, double threshold,
                                      std::span<const std::uint32_t> depths) {
    return trend_estimate(
        [&](double gamma, std::uint32_t L) {
            const Tree t = family(L);
            return min_cutset_sum(t, EdgeWeighting::depth_power(t, gamma)).value;
        },
        gamma_grid, threshold, depths);
}

TrendEstimate branching_ruin_estimate_levels(
    const std::function<std::vector<double>(std::uint32_t)>& level_sizes_family,
    std::span<const double> gamma_grid, double threshold, std::span<const std::uint32_t> depths) {
    return trend_estimate(
        [&](double gamma, std::uint32_t L) {
            const auto sizes = level_sizes_family(L);
            std::vector<double> w(sizes.size(), 0.0);
            for (std::size_t n = 1; n < w.size(); ++n)
                w[n] = std::pow(static_cast<double>(n), -gamma);
            return min_cutset_sum_levels(sizes, w).value;
        },
        gamma_grid, threshold, depths);
}

}  // namespace goerw
