#include "goerw/percolation.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "goerw/error.hpp"
#include "goerw/parallel.hpp"
#include "goerw/rng.hpp"

namespace goerw {

namespace {

constexpr std::uint8_t kOpenKnown = 1, kOpen = 2, kClusterKnown = 4, kCluster = 8;

void check_edge(const Tree& tree, VertexId e) {
    if (e >= tree.size() || e == Tree::root())
        fail(ErrorKind::InvalidArgument, "edge child " + std::to_string(e) + " does not name an edge");
}

}  // namespace

PercolationSample sample_ruin_percolation(const Tree& tree, const Environment& env, std::uint64_t seed,
                                          std::uint64_t step_cap) {
    require(env.size() == tree.size(), "environment and tree sizes differ");
    PercolationSample s;
    s.seed = seed;
    s.open.assign(tree.size(), 0);
    s.in_cluster.assign(tree.size(), 0);
    const ClockTable clocks(seed);
    ExtensionScratch scratch;
    for (std::uint32_t n = 1; n <= tree.truncation_depth(); ++n) {
        for (VertexId v : tree.level(n)) {
            const auto outcome = extension_first_passage(tree, env, v, clocks, step_cap, scratch);
            if (outcome == ExtensionOutcome::StepCap) {
                s.valid = false;
                ++s.capped_edges;
            }
            s.open[v] = outcome == ExtensionOutcome::HitTarget;
            const VertexId p = tree.parent(v);
            s.in_cluster[v] = s.open[v] && (p == Tree::root() || s.in_cluster[p]);
        }
    }
    return s;
}

ClusterProbe::ClusterProbe(const Tree& tree, const Environment& env, std::uint64_t step_cap)
    : tree_(tree), env_(env), step_cap_(step_cap), stamp_(tree.size(), 0), state_(tree.size(), 0) {
    require(env.size() == tree.size(), "environment and tree sizes differ");
}

void ClusterProbe::reset(std::uint64_t seed) {
    clocks_ = ClockTable(seed);
    valid_ = true;
    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
}

bool ClusterProbe::open(VertexId e) {
    check_edge(tree_, e);
    if (stamp_[e] != epoch_) {
        stamp_[e] = epoch_;
        state_[e] = 0;
    }
    if (!(state_[e] & kOpenKnown)) {
        const auto outcome = extension_first_passage(tree_, env_, e, clocks_, step_cap_, scratch_);
        if (outcome == ExtensionOutcome::StepCap)
            valid_ = false;
        state_[e] |= kOpenKnown | (outcome == ExtensionOutcome::HitTarget ? kOpen : 0);
    }
    return state_[e] & kOpen;
}

bool ClusterProbe::in_cluster(VertexId e) {
    check_edge(tree_, e);
    // Root-to-e closure; stops at the first closed edge from the top.
    const auto path = tree_.path_from_root(e);
    bool connected = true;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const VertexId v = path[i];
        if (stamp_[v] == epoch_ && (state_[v] & kClusterKnown)) {
            connected = state_[v] & kCluster;
        } else {
            connected = connected && open(v);
            state_[v] |= kClusterKnown | (connected ? kCluster : 0);
        }
        if (!connected)
            return false;
    }
    return connected;
}

BinomialEstimate edge_connection_probability_mc(const Tree& tree, const Environment& env, VertexId e,
                                                std::uint64_t trials, std::uint64_t master_seed) {
    check_edge(tree, e);
    require(trials >= 100, "at least 100 trials are required");
    // 0 = not connected, 1 = connected, 2 = invalid
    std::vector<std::uint8_t> outcome(trials);
    constexpr std::uint64_t chunk = 1024;
    const std::uint64_t chunks = (trials + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        ClusterProbe probe(tree, env);
        for (std::uint64_t i = c * chunk; i < std::min(trials, (c + 1) * chunk); ++i) {
            probe.reset(derive_seed(master_seed, i));
            const bool in = probe.in_cluster(e);
            outcome[i] = probe.valid() ? (in ? 1 : 0) : 2;
        }
    });
    BinomialEstimate est;
    for (auto o : outcome) {
        if (o == 2) {
            ++est.excluded;
            continue;
        }
        ++est.trials;
        est.successes += o;
    }
    return est;
}

double adapted_conductance(const Tree& tree, const Environment& env, VertexId e) {
    check_edge(tree, e);
    if (tree.depth(e) == 1)
        return 1.0;
    const double p = psi(tree, env, e);
    if (p >= 1.0)
        return std::numeric_limits<double>::infinity();
    return Psi(tree, env, e) / (1.0 - p);
}

QuasiIndependenceResult quasi_independence_statistic(const Tree& tree, const Environment& env, VertexId e1,
                                                     VertexId e2, std::uint64_t trials, std::uint64_t master_seed) {
    check_edge(tree, e1);
    check_edge(tree, e2);
    require(e1 != e2, "the two edges must differ");
    require(trials >= 100, "at least 100 trials are required");

    QuasiIndependenceResult r;
    const VertexId ca = tree.common_ancestor(e1, e2);
    r.conditioning_edge = ca == Tree::root() ? kNoVertex : ca;
    const auto constants = quasi_independence_constants(tree, env);
    r.K = constants.K;
    r.M = constants.M;
    r.trials = trials;

    // bit0 conditioning hit, bit1 A, bit2 B, bit3 invalid
    std::vector<std::uint8_t> code(trials);
    constexpr std::uint64_t chunk = 1024;
    const std::uint64_t chunks = (trials + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        ClusterProbe probe(tree, env);
        for (std::uint64_t i = c * chunk; i < std::min(trials, (c + 1) * chunk); ++i) {
            probe.reset(derive_seed(master_seed, i));
            std::uint8_t k = 0;
            if (r.conditioning_edge == kNoVertex || probe.in_cluster(r.conditioning_edge)) {
                k = 1;
                k |= probe.in_cluster(e1) ? 2 : 0;
                k |= probe.in_cluster(e2) ? 4 : 0;
            }
            code[i] = probe.valid() ? k : 8;
        }
    });

    std::uint64_t n = 0, nA = 0, nB = 0, nAB = 0;
    for (auto k : code) {
        if (k & 8) {
            ++r.excluded;
            continue;
        }
        if (!(k & 1))
            continue;
        ++n;
        nA += (k >> 1) & 1;
        nB += (k >> 2) & 1;
        nAB += ((k & 6) == 6);
    }
    r.conditioning_hits = n;
    if (n < 50)
        fail(ErrorKind::RareEvent, "conditioning edge " + std::to_string(ca) + " was in the cluster in only " +
                                       std::to_string(n) + " of " + std::to_string(trials) +
                                       " samples (need at least 50)");

    const double dn = static_cast<double>(n);
    const double p1 = nA / dn, p2 = nB / dn, p12 = nAB / dn;
    r.p1 = p1;
    r.p2 = p2;
    r.joint = p12;
    r.product = p1 * p2;

    // Second moments of a = AB - p12, b = A - p1, c = B - p2.
    const double aa = p12 * (1 - p12), bb = p1 * (1 - p1), cc = p2 * (1 - p2);
    const double ab = p12 * (1 - p1), ac = p12 * (1 - p2), bc = p12 - p1 * p2;

    const double M = r.M;
    const double var_excess = aa + M * M * (p2 * p2 * bb + p1 * p1 * cc + 2 * p1 * p2 * bc) -
                              2 * M * (p2 * ab + p1 * ac);
    r.excess_se = std::sqrt(std::max(0.0, var_excess) / dn);
    r.bound_holds = p12 <= M * r.product + 3 * r.excess_se;

    if (p1 > 0 && p2 > 0) {
        const double q = p1 * p2;
        const double ratio = p12 / q;
        const double var = aa / (q * q) + ratio * ratio * (bb / (p1 * p1) + cc / (p2 * p2)) -
                           2 * ratio * (ab / (p1 * q) + ac / (p2 * q)) + 2 * ratio * ratio * bc / q;
        r.ratio = ratio;
        r.ratio_se = std::sqrt(std::max(0.0, var) / dn);
    } else {
        r.ratio = std::numeric_limits<double>::quiet_NaN();
        r.ratio_se = std::numeric_limits<double>::infinity();
    }
    return r;
}

double ConcentrationRow::frequency() const noexcept {
    return samples == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(samples);
}

double ConcentrationRow::std_error() const noexcept {
    if (samples == 0)
        return 0.0;
    const double p = frequency();
    return std::sqrt(p * (1 - p) / static_cast<double>(samples));
}

bool concentration_event_holds(double Psi_e, std::uint32_t depth, double m, double kappa, double epsilon) {
    const double n = static_cast<double>(depth);
    const double lower = std::pow(n, -2.0 + m - epsilon) / kappa;
    const double upper = std::pow(n, -2.0 + m + epsilon);
    return lower <= Psi_e && Psi_e <= upper;
}

std::vector<ConcentrationRow> concentration_experiment(const Tree& tree, const AlphaDistribution& dist,
                                                       double epsilon, std::span<const std::uint32_t> depths,
                                                       std::uint64_t env_samples, std::uint64_t master_seed) {
    require(epsilon > 0, "epsilon must be positive");
    require(!depths.empty(), "at least one depth is required");
    require(env_samples > 0, "at least one environment sample is required");
    std::vector<ConcentrationRow> rows;
    for (auto d : depths) {
        if (d < 1 || d > tree.truncation_depth())
            fail(ErrorKind::InvalidArgument, "depth " + std::to_string(d) + " outside 1.." +
                                                 std::to_string(tree.truncation_depth()));
        rows.push_back({d, tree.level(d).front(), 0, env_samples});
    }
    const double m = dist.m();
    std::vector<std::uint8_t> fails(env_samples * rows.size());
    parallel_for(env_samples, [&](std::size_t s) {
        const Environment env = sample_random_environment(tree, dist, derive_seed(master_seed, s));
        const double k = kappa(tree, env);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double P = Psi(tree, env, rows[i].edge);
            fails[s * rows.size() + i] = !concentration_event_holds(P, rows[i].depth, m, k, epsilon);
        }
    });
    for (std::size_t s = 0; s < env_samples; ++s)
        for (std::size_t i = 0; i < rows.size(); ++i)
            rows[i].failures += fails[s * rows.size() + i];
    return rows;
}

bool nonincreasing_within_noise(std::span<const ConcentrationRow> rows, double k_sigma, std::size_t burn_in) {
    for (std::size_t i = burn_in; i + 1 < rows.size(); ++i) {
        const double a = rows[i].std_error(), b = rows[i + 1].std_error();
        if (rows[i + 1].frequency() > rows[i].frequency() + k_sigma * std::sqrt(a * a + b * b))
            return false;
    }
    return true;
}

void write_percolation_csv(std::ostream& out, const Tree& tree, std::span<const PercolationSample> samples,
                           std::uint64_t first_index) {
    out << "parent,child,open,in_cluster,sample_index\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& sample = samples[s];
        for (VertexId v = 1; v < tree.size(); ++v)
            out << tree.parent(v) << ',' << v << ',' << int(sample.open[v]) << ',' << int(sample.in_cluster[v])
                << ',' << first_index + s << '\n';
    }
}

}  // namespace goerw
