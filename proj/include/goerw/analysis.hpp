#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "goerw/cutset.hpp"
#include "goerw/environment.hpp"
#include "goerw/stats.hpp"
#include "goerw/tree.hpp"

namespace goerw {

/// Birth-death chain on {0..N} absorbed at 0 and N. From 0 < i < N it steps
/// to i-1 with probability q_i and to i+1 with p_i, where mu_i = q_i / p_i.
class GamblerChain {
public:
    /// `mu` holds mu_1..mu_{N-1}, so N = mu.size() + 1.
    GamblerChain(std::vector<double> mu, std::uint32_t start);

    std::uint32_t N() const noexcept { return static_cast<std::uint32_t>(mu_.size() + 1); }
    std::uint32_t start() const noexcept { return start_; }
    double mu(std::uint32_t i) const { return mu_.at(i - 1); }
    double p(std::uint32_t i) const { return 1.0 / (1.0 + mu(i)); }
    double q(std::uint32_t i) const { return mu(i) / (1.0 + mu(i)); }

private:
    std::vector<double> mu_;
    std::uint32_t start_;
};

/// Ruin probability x_i = 1 - phi(i)/phi(N) from the chain's start.
double gambler_ruin_exact(const GamblerChain& chain);

/// x_0..x_N.
std::vector<double> gambler_ruin_profile(const GamblerChain& chain);

/// Trial i runs on SplitMix64(derive_seed(seed, i)).
BinomialEstimate gambler_ruin_mc(const GamblerChain& chain, std::uint64_t trials, std::uint64_t seed);

/// min(1, 2 exp(-2 t^2 / sum (b_i - a_i)^2)).
double hoeffding_bound(double t, std::span<const std::pair<double, double>> ranges);

/// A flow from the root to the truncation leaves, indexed by child id.
struct TreeFlow {
    double max_flow = 0.0;          // value of the maximum flow
    double value = 0.0;             // value of theta after scaling to min(1, max_flow)
    std::vector<double> theta;
};

/// Maximum flow under `capacity` by one bottom-up pass, then routed top-down
/// in proportion to each child's capacity-limited throughput and scaled so
/// the value out of the root is min(1, max flow).
TreeFlow tree_flow(const Tree& tree, const EdgeWeighting& capacity);

/// Largest relative imbalance |in - out| / in over internal vertices.
double flow_conservation_error(const Tree& tree, const TreeFlow& flow);

struct FlowEnergyRow {
    std::uint32_t depth = 0;
    double max_flow = 0.0;
    double value = 0.0;
    double energy = 0.0;  // sum theta^2 / c over edges with finite c
    bool degenerate = false;
};

/// Capacities Psi(e)^gamma, energy against the adapted conductances.
FlowEnergyRow flow_energy(const Tree& tree, const Environment& env, double gamma);

std::vector<FlowEnergyRow> flow_energy_check(const std::function<TreeWithEnvironment(std::uint32_t)>& family,
                                             double gamma, std::span<const std::uint32_t> depths);

/// A tree with the branching-ruin number used for the phase comparison.
struct PhaseFamily {
    std::string id;
    Tree tree;
    double br_r = 0.0;
};

/// Polynomial tree of exponent b truncated at L, with br_r = b.
PhaseFamily polynomial_phase_family(double b, std::uint32_t L);

enum class Verdict { RecurrentLeaning, TransientLeaning, Inconclusive };
const char* to_string(Verdict v) noexcept;

struct PhaseVerdict {
    std::string family;
    std::string control_family;
    std::string env;
    double m = 0.0;
    double br_r = 0.0;
    double threshold = 0.0;  // 2 - m
    std::uint32_t escape_depth = 0;
    std::uint64_t horizon = 0;
    std::uint32_t returns_target = 10;
    BinomialEstimate escape;
    BinomialEstimate control_escape;
    double sigma = 0.0;  // sqrt(se^2 + se_control^2)
    double mean_returns = 0.0;
    double frac_return_target = 0.0;  // trials stopped by the k-th return
    double frac_horizon = 0.0;        // trials stopped by the horizon
    Verdict verdict = Verdict::Inconclusive;
};

struct PhaseRun {
    BinomialEstimate escape;
    double mean_returns = 0.0;
    double frac_return_target = 0.0;
    double frac_horizon = 0.0;
};

/// Annealed runs: trial i draws a fresh environment from derive_seed(seed, 2i)
/// and a fresh walk from derive_seed(seed, 2i + 1), stopped at the first of
/// depth D, the `returns`-th return to the root, or `horizon` steps.
PhaseRun phase_run(const Tree& tree, const AlphaDistribution& dist, std::uint32_t D, std::uint64_t horizon,
                   std::uint32_t returns, std::uint64_t trials, std::uint64_t seed);

/// Escape frequency p against a control frequency p_c with
/// sigma = sqrt(se^2 + se_c^2): transient-leaning if p >= 0.05 and
/// p - p_c > 3 sigma; recurrent-leaning if p <= p_c + 3 sigma; otherwise
/// inconclusive.
Verdict classify_phase(const BinomialEstimate& escape, const BinomialEstimate& control);

/// Refuses (NearCritical) when |br_r - (2 - m)| < margin. The control runs
/// the same environment law on `control` with the same seed.
PhaseVerdict phase_diagnostic(const PhaseFamily& family, const PhaseFamily& control, const AlphaDistribution& dist,
                              double margin, std::uint32_t D, std::uint64_t horizon, std::uint64_t trials,
                              std::uint64_t seed);

}  // namespace goerw
