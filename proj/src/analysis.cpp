#include "goerw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "goerw/error.hpp"
#include "goerw/format.hpp"
#include "goerw/parallel.hpp"
#include "goerw/rng.hpp"
#include "goerw/walk.hpp"

namespace goerw {

GamblerChain::GamblerChain(std::vector<double> mu, std::uint32_t start) : mu_(std::move(mu)), start_(start) {
    require(!mu_.empty(), "the chain needs N >= 2 (at least one interior bias)");
    for (std::size_t i = 0; i < mu_.size(); ++i)
        if (!(mu_[i] > 0.0) || !std::isfinite(mu_[i]))
            fail(ErrorKind::InvalidArgument, "bias mu_" + std::to_string(i + 1) + " must be positive and finite");
    require(start_ <= N(), "start must lie in 0..N");
}

std::vector<double> gambler_ruin_profile(const GamblerChain& chain) {
    const std::uint32_t N = chain.N();
    // phi(k) = sum_{j=1}^k prod_{h=1}^{j-1} mu_h
    std::vector<double> phi(N + 1, 0.0);
    double prod = 1.0;
    for (std::uint32_t j = 1; j <= N; ++j) {
        phi[j] = phi[j - 1] + prod;
        if (j < N)
            prod *= chain.mu(j);
    }
    std::vector<double> x(N + 1);
    for (std::uint32_t i = 0; i <= N; ++i)
        x[i] = 1.0 - phi[i] / phi[N];
    x[N] = 0.0;
    return x;
}

double gambler_ruin_exact(const GamblerChain& chain) {
    return gambler_ruin_profile(chain)[chain.start()];
}

BinomialEstimate gambler_ruin_mc(const GamblerChain& chain, std::uint64_t trials, std::uint64_t seed) {
    require(trials >= 100, "at least 100 trials are required");
    std::vector<std::uint8_t> ruined(trials);
    parallel_for(trials, [&](std::size_t t) {
        SplitMix64 rng(derive_seed(seed, t));
        std::uint32_t i = chain.start();
        while (i != 0 && i != chain.N())
            i = rng.uniform() < chain.q(i) ? i - 1 : i + 1;
        ruined[t] = i == 0;
    });
    BinomialEstimate est;
    est.trials = trials;
    est.successes = std::accumulate(ruined.begin(), ruined.end(), std::uint64_t{0});
    return est;
}

double hoeffding_bound(double t, std::span<const std::pair<double, double>> ranges) {
    require(!ranges.empty(), "at least one range is required");
    require(t > 0.0, "t must be positive");
    double width2 = 0.0;
    for (auto [a, b] : ranges) {
        require(b >= a, "each range needs b >= a");
        width2 += (b - a) * (b - a);
    }
    if (width2 == 0.0)
        return 0.0;
    return std::min(1.0, 2.0 * std::exp(-2.0 * t * t / width2));
}

TreeFlow tree_flow(const Tree& tree, const EdgeWeighting& capacity) {
    require(tree.edge_count() > 0, "the tree has no edges");
    require(capacity.size() == tree.size(), "capacity vector and tree sizes differ");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> through(tree.size(), 0.0);  // min(cap(v), F(v))
    std::vector<double> F(tree.size(), 0.0);
    for (auto n = static_cast<std::int64_t>(tree.truncation_depth()); n >= 0; --n) {
        for (VertexId v : tree.level(static_cast<std::uint32_t>(n))) {
            if (tree.is_truncation_leaf(v)) {
                F[v] = inf;
            } else {
                double s = 0.0;
                for (VertexId c : tree.children(v))
                    s += through[c];
                F[v] = s;
            }
            if (v != Tree::root())
                through[v] = std::min(capacity[v], F[v]);
        }
    }
    TreeFlow flow;
    flow.max_flow = F[Tree::root()];
    flow.value = std::min(1.0, flow.max_flow);
    flow.theta.assign(tree.size(), 0.0);
    std::vector<double> inflow(tree.size(), 0.0);
    inflow[Tree::root()] = flow.value;
    for (std::uint32_t n = 0; n < tree.truncation_depth(); ++n) {
        for (VertexId v : tree.level(n)) {
            const auto kids = tree.children(v);
            if (kids.empty() || inflow[v] == 0.0 || F[v] == 0.0)
                continue;
            double given = 0.0;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                const VertexId c = kids[i];
                double share = i + 1 == kids.size() ? inflow[v] - given : inflow[v] * (through[c] / F[v]);
                share = std::clamp(share, 0.0, through[c]);
                flow.theta[c] = share;
                inflow[c] = share;
                given += share;
            }
        }
    }
    return flow;
}

double flow_conservation_error(const Tree& tree, const TreeFlow& flow) {
    double worst = 0.0;
    for (VertexId v = 0; v < tree.size(); ++v) {
        if (tree.is_truncation_leaf(v) || tree.children(v).empty())
            continue;
        const double in = v == Tree::root() ? flow.value : flow.theta[v];
        double out = 0.0;
        for (VertexId c : tree.children(v))
            out += flow.theta[c];
        if (in > 0.0)
            worst = std::max(worst, std::abs(in - out) / in);
        else
            worst = std::max(worst, out);
    }
    return worst;
}

FlowEnergyRow flow_energy(const Tree& tree, const Environment& env, double gamma) {
    require(gamma > 0.0, "gamma must be positive");
    const RuinProfile profile(tree, env);
    std::vector<double> cap(tree.size(), 0.0);
    for (VertexId v = 1; v < tree.size(); ++v)
        cap[v] = profile.Psi_pow(v, gamma);
    const TreeFlow flow = tree_flow(tree, EdgeWeighting(std::move(cap)));
    FlowEnergyRow row;
    row.depth = tree.truncation_depth();
    row.max_flow = flow.max_flow;
    row.value = flow.value;
    row.degenerate = !(flow.max_flow > 0.0);
    for (VertexId v = 1; v < tree.size(); ++v) {
        const double th = flow.theta[v];
        const double c = profile.adapted_conductance(v);
        if (th > 0.0 && std::isfinite(c))
            row.energy += th * th / c;
    }
    return row;
}

std::vector<FlowEnergyRow> flow_energy_check(const std::function<TreeWithEnvironment(std::uint32_t)>& family,
                                             double gamma, std::span<const std::uint32_t> depths) {
    require(!depths.empty(), "at least one depth is required");
    std::vector<FlowEnergyRow> rows;
    for (auto L : depths) {
        const auto te = family(L);
        rows.push_back(flow_energy(te.tree, te.env, gamma));
    }
    return rows;
}

PhaseFamily polynomial_phase_family(double b, std::uint32_t L) {
    return {"poly:b=" + format_double(b) + ",L=" + std::to_string(L), build_polynomial(b, L), b};
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::RecurrentLeaning: return "recurrent-leaning";
        case Verdict::TransientLeaning: return "transient-leaning";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

PhaseRun phase_run(const Tree& tree, const AlphaDistribution& dist, std::uint32_t D, std::uint64_t horizon,
                   std::uint32_t returns, std::uint64_t trials, std::uint64_t seed) {
    require(trials > 0, "at least one trial is required");
    require(D >= 1 && D <= tree.truncation_depth(), "escape depth must lie in 1..L");
    require(horizon > 0, "horizon must be positive");
    StopRule stop;
    stop.hit_depth = D;
    stop.returns_to_root = returns;
    stop.max_steps = horizon;
    stop.record_positions = false;

    struct Outcome {
        std::uint8_t reason;
        std::uint32_t returns;
    };
    std::vector<Outcome> out(trials);
    parallel_for(trials, [&](std::size_t i) {
        const Environment env = sample_random_environment(tree, dist, derive_seed(seed, 2 * i));
        const auto t = simulate(tree, env, stop, derive_seed(seed, 2 * i + 1));
        out[i] = {static_cast<std::uint8_t>(t.reason), t.returns_to_root};
    });

    PhaseRun run;
    run.escape.trials = trials;
    double returns_sum = 0.0;
    std::uint64_t k_returns = 0, at_horizon = 0;
    for (const auto& o : out) {
        const auto reason = static_cast<StopReason>(o.reason);
        // hit_depth <= L, so reaching a truncation leaf reports HitDepth first.
        run.escape.successes += reason == StopReason::HitDepth;
        k_returns += reason == StopReason::ReturnsToRoot;
        at_horizon += reason == StopReason::MaxSteps || reason == StopReason::StepCap;
        returns_sum += o.returns;
    }
    const double n = static_cast<double>(trials);
    run.mean_returns = returns_sum / n;
    run.frac_return_target = static_cast<double>(k_returns) / n;
    run.frac_horizon = static_cast<double>(at_horizon) / n;
    return run;
}

Verdict classify_phase(const BinomialEstimate& escape, const BinomialEstimate& control) {
    const double p = escape.estimate(), pc = control.estimate();
    const double sigma = std::hypot(escape.std_error(), control.std_error());
    if (p >= 0.05 && p - pc > 3.0 * sigma)
        return Verdict::TransientLeaning;
    if (p <= pc + 3.0 * sigma)
        return Verdict::RecurrentLeaning;
    return Verdict::Inconclusive;
}

PhaseVerdict phase_diagnostic(const PhaseFamily& family, const PhaseFamily& control, const AlphaDistribution& dist,
                              double margin, std::uint32_t D, std::uint64_t horizon, std::uint64_t trials,
                              std::uint64_t seed) {
    require(margin >= 0.0, "margin must be nonnegative");
    PhaseVerdict v;
    v.family = family.id;
    v.control_family = control.id;
    v.env = "alpha:" + dist.spec();
    v.m = dist.m();
    v.br_r = family.br_r;
    v.threshold = 2.0 - v.m;
    v.escape_depth = D;
    v.horizon = horizon;
    if (std::abs(v.br_r - v.threshold) < margin)
        fail(ErrorKind::NearCritical, "br_r = " + format_double(v.br_r) + " is within margin " + format_double(margin) +
                                          " of the threshold 2 - m = " + format_double(v.threshold) +
                                          "; no verdict is issued near criticality");
    const PhaseRun run = phase_run(family.tree, dist, D, horizon, v.returns_target, trials, seed);
    const PhaseRun ctl = phase_run(control.tree, dist, D, horizon, v.returns_target, trials, seed);
    v.escape = run.escape;
    v.control_escape = ctl.escape;
    v.sigma = std::hypot(run.escape.std_error(), ctl.escape.std_error());
    v.mean_returns = run.mean_returns;
    v.frac_return_target = run.frac_return_target;
    v.frac_horizon = run.frac_horizon;
    v.verdict = classify_phase(run.escape, ctl.escape);
    return v;
}

}  // namespace goerw
