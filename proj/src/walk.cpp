#include "goerw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "goerw/error.hpp"

namespace goerw {

const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::ReturnsToRoot: return "returns_to_root";
        case StopReason::HitDepth: return "hit_depth";
        case StopReason::HitVertex: return "hit_vertex";
        case StopReason::Escaped: return "escaped";
        case StopReason::StepCap: return "step_cap";
    }
    return "unknown";
}

std::optional<std::uint64_t> WalkTrajectory::first_hit(VertexId v) const {
    auto it = std::find(positions.begin(), positions.end(), v);
    if (it == positions.end())
        return std::nullopt;
    return static_cast<std::uint64_t>(it - positions.begin());
}

std::uint32_t WalkTrajectory::crossings(const Tree& tree, VertexId a, VertexId b) const {
    if (a != Tree::root() && tree.parent(a) == b)
        return up.at(a);
    if (b != Tree::root() && tree.parent(b) == a)
        return down.at(b);
    fail(ErrorKind::InvalidArgument, "vertices " + std::to_string(a) + " and " + std::to_string(b) + " are not adjacent");
}

namespace {

bool adjacent(const Tree& tree, VertexId a, VertexId b) {
    return (a != Tree::root() && tree.parent(a) == b) || (b != Tree::root() && tree.parent(b) == a);
}

void check_vertex(const Tree& tree, VertexId v) {
    if (v >= tree.size())
        fail(ErrorKind::InvalidArgument, "vertex " + std::to_string(v) + " is not in the tree");
}

// Bookkeeping shared by every simulator: counts, stop rules, optional record.
class Recorder {
public:
    Recorder(const Tree& tree, const StopRule& stop, bool escape_at_leaves)
        : tree_(tree), stop_(stop), escape_at_leaves_(escape_at_leaves) {
        if (tree.edge_count() == 0)
            fail(ErrorKind::InvalidArgument, "the walk needs a tree with at least one edge");
        if (stop.hit_vertex)
            check_vertex(tree, *stop.hit_vertex);
        t_.visits.assign(tree.size(), 0);
        t_.up.assign(tree.size(), 0);
        t_.down.assign(tree.size(), 0);
        t_.visits[Tree::root()] = 1;
        t_.final_position = Tree::root();
        if (stop.record_positions)
            t_.positions.push_back(Tree::root());
        // Rules that already hold at time 0.
        if (stop.max_steps && *stop.max_steps == 0)
            finish(StopReason::MaxSteps);
        else if (stop.hit_vertex && *stop.hit_vertex == Tree::root())
            finish(StopReason::HitVertex);
        else if (stop.hit_depth && *stop.hit_depth == 0)
            finish(StopReason::HitDepth);
    }

    bool done() const noexcept { return done_; }
    std::uint32_t visits(VertexId v) const { return t_.visits[v]; }

    void move(VertexId from, VertexId to) {
        ++t_.steps;
        if (tree_.parent(from) == to && from != Tree::root())
            ++t_.up[from];
        else
            ++t_.down[to];
        ++t_.visits[to];
        t_.final_position = to;
        t_.max_depth = std::max(t_.max_depth, tree_.depth(to));
        if (stop_.record_positions)
            t_.positions.push_back(to);

        if (to == Tree::root()) {
            ++t_.returns_to_root;
            if (!t_.first_return)
                t_.first_return = t_.steps;
            if (stop_.returns_to_root && t_.returns_to_root >= *stop_.returns_to_root)
                return finish(StopReason::ReturnsToRoot);
        }
        if (stop_.hit_vertex && *stop_.hit_vertex == to)
            return finish(StopReason::HitVertex);
        if (stop_.hit_depth && tree_.depth(to) >= *stop_.hit_depth) {
            t_.escaped = escape_at_leaves_ && tree_.is_truncation_leaf(to);
            return finish(StopReason::HitDepth);
        }
        if (escape_at_leaves_ && tree_.is_truncation_leaf(to)) {
            t_.escaped = true;
            return finish(StopReason::Escaped);
        }
        if (stop_.max_steps && t_.steps >= *stop_.max_steps)
            return finish(StopReason::MaxSteps);
        if (t_.steps >= stop_.step_cap) {
            t_.truncated = true;
            return finish(StopReason::StepCap);
        }
    }

    WalkTrajectory take() { return std::move(t_); }

private:
    void finish(StopReason r) {
        t_.reason = r;
        done_ = true;
    }

    const Tree& tree_;
    const StopRule& stop_;
    bool escape_at_leaves_;
    bool done_ = false;
    WalkTrajectory t_;
};

// Neighbor slots: slot 0 is the parent for non-root vertices, then children.
struct Slots {
    std::vector<std::uint32_t> begin;

    explicit Slots(const Tree& tree) : begin(tree.size() + 1, 0) {
        for (VertexId v = 0; v < tree.size(); ++v)
            begin[v + 1] = begin[v] + tree.degree(v);
    }
};

VertexId neighbor(const Tree& tree, VertexId v, std::uint32_t local) {
    if (v != Tree::root()) {
        if (local == 0)
            return tree.parent(v);
        --local;
    }
    return tree.children(v)[local];
}

// Strictly earlier time wins; equal times go to the lower vertex id.
bool earlier(double t, VertexId w, double best_t, VertexId best_w) {
    return t < best_t || (t == best_t && w < best_w);
}

}  // namespace

bool trajectory_is_consistent(const Tree& tree, const WalkTrajectory& t) {
    if (t.positions.empty())
        fail(ErrorKind::InvalidArgument, "trajectory positions were not recorded");
    if (t.positions.size() != t.steps + 1 || t.positions.front() != Tree::root())
        return false;
    std::vector<std::uint32_t> visits(tree.size(), 0), up(tree.size(), 0), down(tree.size(), 0);
    visits[t.positions.front()] = 1;
    for (std::size_t i = 1; i < t.positions.size(); ++i) {
        const VertexId a = t.positions[i - 1], b = t.positions[i];
        if (a >= tree.size() || b >= tree.size() || !adjacent(tree, a, b))
            return false;
        ++visits[b];
        if (a != Tree::root() && tree.parent(a) == b)
            ++up[a];
        else
            ++down[b];
    }
    return visits == t.visits && up == t.up && down == t.down && t.final_position == t.positions.back();
}

Rates rates(const Tree& tree, const Environment& env, VertexId v, VertexId u) {
    check_vertex(tree, v);
    check_vertex(tree, u);
    if (!adjacent(tree, v, u))
        fail(ErrorKind::InvalidArgument, "vertices " + std::to_string(v) + " and " + std::to_string(u) + " are not adjacent");
    // r(v, v^-1) runs over P_{v^-1}, r(v, child) over P_v.
    const VertexId top = (v != Tree::root() && tree.parent(v) == u) ? u : v;
    double log_l = 0.0, log_m = 0.0;
    for (VertexId x = top; x != Tree::root(); x = tree.parent(x)) {
        log_l -= std::log(env.lambda(x));
        log_m -= std::log(env.mu(x));
    }
    return {std::exp(log_l), std::exp(log_m)};
}

std::vector<std::pair<VertexId, double>> transition_law(const Tree& tree, const Environment& env, VertexId v,
                                                        std::uint32_t visits_at_v) {
    check_vertex(tree, v);
    if (visits_at_v == 0)
        fail(ErrorKind::InvalidArgument, "the walk must be at the vertex (visit count >= 1)");
    std::vector<std::pair<VertexId, double>> law;
    const auto kids = tree.children(v);
    if (v == Tree::root()) {
        for (VertexId c : kids)
            law.emplace_back(c, 1.0 / static_cast<double>(kids.size()));
        return law;
    }
    const double bias = visits_at_v == 1 ? env.lambda(v) : env.mu(v);
    const double total = bias + static_cast<double>(kids.size());
    law.emplace_back(tree.parent(v), bias / total);
    for (VertexId c : kids)
        law.emplace_back(c, 1.0 / total);
    return law;
}

VertexId step_direct(const Tree& tree, const Environment& env, VertexId v, std::uint32_t visits_at_v,
                     SplitMix64& rng) {
    const auto kids = tree.children(v);
    const double u = rng.uniform();
    if (v == Tree::root()) {
        if (kids.empty())
            fail(ErrorKind::InvalidArgument, "the root has no children");
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(u * kids.size()), kids.size() - 1);
        return kids[i];
    }
    const double bias = visits_at_v == 1 ? env.lambda(v) : env.mu(v);
    const double total = bias + static_cast<double>(kids.size());
    double x = u * total - bias;
    if (x < 0.0 || kids.empty())
        return tree.parent(v);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(x), kids.size() - 1);
    return kids[i];
}

WalkTrajectory simulate(const Tree& tree, const Environment& env, const StopRule& stop, std::uint64_t seed) {
    require(env.size() == tree.size(), "environment and tree sizes differ");
    Recorder rec(tree, stop, true);
    SplitMix64 rng(seed);
    VertexId x = Tree::root();
    while (!rec.done()) {
        const VertexId y = step_direct(tree, env, x, rec.visits(x), rng);
        rec.move(x, y);
        x = y;
    }
    return rec.take();
}

WalkTrajectory simulate_rubin(const Tree& tree, const Environment& env, const ClockTable& clocks,
                              const StopRule& stop) {
    require(env.size() == tree.size(), "environment and tree sizes differ");
    Recorder rec(tree, stop, true);
    const Slots slots(tree);
    const std::size_t total = slots.begin.back();
    std::vector<double> next(total, 0.0);
    std::vector<std::uint32_t> count(total, 0);
    std::vector<std::uint32_t> lambda_slot(tree.size(), static_cast<std::uint32_t>(-1));
    std::vector<std::uint8_t> mu_ready(tree.size(), 0);

    auto local_rate = [&](VertexId v, std::uint32_t local, bool first) {
        if (v != Tree::root() && local == 0)
            return first ? env.lambda(v) : env.mu(v);
        return 1.0;
    };

    VertexId x = Tree::root();
    while (!rec.done()) {
        const std::uint32_t deg = tree.degree(x);
        const std::uint32_t base = slots.begin[x];
        std::uint32_t best = 0;
        if (rec.visits(x) == 1) {
            double best_t = 0.0;
            VertexId best_w = kNoVertex;
            for (std::uint32_t s = 0; s < deg; ++s) {
                const VertexId w = neighbor(tree, x, s);
                const double t = clocks(x, w, 0) / local_rate(x, s, true);
                if (best_w == kNoVertex || earlier(t, w, best_t, best_w)) {
                    best = s;
                    best_t = t;
                    best_w = w;
                }
            }
            lambda_slot[x] = best;
        } else {
            if (!mu_ready[x]) {
                for (std::uint32_t s = 0; s < deg; ++s) {
                    const std::uint32_t o = lambda_slot[x] == s ? 1 : 0;
                    next[base + s] = clocks(x, neighbor(tree, x, s), o + 1) / local_rate(x, s, false);
                }
                mu_ready[x] = 1;
            }
            VertexId best_w = kNoVertex;
            for (std::uint32_t s = 0; s < deg; ++s) {
                const VertexId w = neighbor(tree, x, s);
                if (best_w == kNoVertex || earlier(next[base + s], w, next[base + best], best_w)) {
                    best = s;
                    best_w = w;
                }
            }
            const std::uint32_t o = lambda_slot[x] == best ? 1 : 0;
            const std::uint32_t c = ++count[base + best];
            next[base + best] += clocks(x, best_w, o + c + 1) / local_rate(x, best, false);
        }
        const VertexId y = neighbor(tree, x, best);
        rec.move(x, y);
        x = y;
    }
    return rec.take();
}

namespace {

// X^(v) on P_v. Positions are indices into the path; slot 0 is the parent
// on the path, slot 1 the on-path child.
class Extension {
public:
    Extension(const Tree& tree, const Environment& env, VertexId v, const ClockTable& clocks, ExtensionScratch& s)
        : tree_(tree), env_(env), clocks_(clocks), s_(s) {
        check_vertex(tree, v);
        if (v == Tree::root())
            fail(ErrorKind::InvalidArgument, "the extension is defined for non-root vertices only");
        require(env.size() == tree.size(), "environment and tree sizes differ");
        s_.path.clear();
        for (VertexId x = v; x != Tree::root(); x = tree.parent(x))
            s_.path.push_back(x);
        s_.path.push_back(Tree::root());
        std::reverse(s_.path.begin(), s_.path.end());
        const std::size_t n = s_.path.size();
        s_.visits.assign(n, 0);
        s_.offset.assign(2 * n, 0);
        s_.count.assign(2 * n, 0);
        s_.next.assign(2 * n, -1.0);  // negative marks "not yet drawn"
        s_.visits[0] = 1;
        last_ = n - 1;
    }

    std::size_t last() const noexcept { return last_; }
    VertexId vertex(std::size_t k) const { return s_.path[k]; }

    std::size_t step(std::size_t k) {
        std::size_t to;
        if (k == last_) {
            to = k - 1;
        } else if (k == 0 && s_.visits[0] > 1) {
            to = mu_step(0);
        } else if (s_.visits[k] == 1) {
            to = lambda_step(k);
        } else {
            to = mu_step(k);
        }
        ++s_.visits[to];
        return to;
    }

private:
    std::size_t lambda_step(std::size_t k) {
        const VertexId u = s_.path[k];
        const VertexId on_child = s_.path[k + 1];
        double best_t = 0.0;
        VertexId best_w = kNoVertex;
        if (k > 0) {
            best_w = s_.path[k - 1];
            best_t = clocks_(u, best_w, 0) / env_.lambda(u);
        }
        for (VertexId c : tree_.children(u)) {
            const double t = clocks_(u, c, 0);
            if (best_w == kNoVertex || earlier(t, c, best_t, best_w)) {
                best_t = t;
                best_w = c;
            }
        }
        if (k > 0 && best_w == s_.path[k - 1]) {
            s_.offset[2 * k] = 1;
            return k - 1;
        }
        if (best_w == on_child) {
            s_.offset[2 * k + 1] = 1;
            return k + 1;
        }
        // The walk would leave P_v; its first return to P_v from u is the
        // first mu-decision among the on-path neighbors.
        return mu_step(k);
    }

    std::size_t mu_step(std::size_t k) {
        const VertexId u = s_.path[k];
        const std::size_t first_slot = k == 0 ? 1 : 0;
        for (std::size_t s = first_slot; s < 2; ++s) {
            const std::size_t i = 2 * k + s;
            if (s_.next[i] < 0.0)
                s_.next[i] = clocks_(u, slot_vertex(k, s), s_.offset[i] + 1u) / mu_rate(k, s);
        }
        std::size_t best = first_slot;
        for (std::size_t s = first_slot + 1; s < 2; ++s)
            if (earlier(s_.next[2 * k + s], slot_vertex(k, s), s_.next[2 * k + best], slot_vertex(k, best)))
                best = s;
        const std::size_t i = 2 * k + best;
        const std::uint32_t c = ++s_.count[i];
        s_.next[i] += clocks_(u, slot_vertex(k, best), s_.offset[i] + c + 1u) / mu_rate(k, best);
        return best == 0 ? k - 1 : k + 1;
    }

    VertexId slot_vertex(std::size_t k, std::size_t s) const { return s == 0 ? s_.path[k - 1] : s_.path[k + 1]; }
    double mu_rate(std::size_t k, std::size_t s) const { return s == 0 ? env_.mu(s_.path[k]) : 1.0; }

    const Tree& tree_;
    const Environment& env_;
    const ClockTable& clocks_;
    ExtensionScratch& s_;
    std::size_t last_ = 0;
};

}  // namespace

WalkTrajectory simulate_extension(const Tree& tree, const Environment& env, VertexId v, const ClockTable& clocks,
                                  const StopRule& stop) {
    ExtensionScratch scratch;
    Extension ext(tree, env, v, clocks, scratch);
    Recorder rec(tree, stop, false);
    std::size_t k = 0;
    while (!rec.done()) {
        const std::size_t j = ext.step(k);
        rec.move(ext.vertex(k), ext.vertex(j));
        k = j;
    }
    return rec.take();
}

ExtensionOutcome extension_first_passage(const Tree& tree, const Environment& env, VertexId v,
                                         const ClockTable& clocks, std::uint64_t step_cap,
                                         ExtensionScratch& scratch) {
    Extension ext(tree, env, v, clocks, scratch);
    std::size_t k = 0;
    for (std::uint64_t n = 0; n < step_cap; ++n) {
        k = ext.step(k);
        if (k == ext.last())
            return ExtensionOutcome::HitTarget;
        if (k == 0)
            return ExtensionOutcome::ReturnedToRoot;
    }
    return ExtensionOutcome::StepCap;
}

Restriction restriction(std::span<const VertexId> positions, const std::vector<bool>& in_set) {
    Restriction r;
    for (VertexId x : positions) {
        if (x >= in_set.size())
            fail(ErrorKind::InvalidArgument, "position " + std::to_string(x) + " outside the membership mask");
        if (in_set[x] && (r.positions.empty() || r.positions.back() != x))
            r.positions.push_back(x);
    }
    r.killing_time = r.positions.empty() ? 0 : r.positions.size() - 1;
    return r;
}

std::vector<bool> path_mask(const Tree& tree, VertexId v) {
    check_vertex(tree, v);
    std::vector<bool> mask(tree.size(), false);
    for (VertexId x = v;; x = tree.parent(x)) {
        mask[x] = true;
        if (x == Tree::root())
            break;
    }
    return mask;
}

}  // namespace goerw
