#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "goerw/clocks.hpp"
#include "goerw/environment.hpp"
#include "goerw/stats.hpp"
#include "goerw/tree.hpp"
#include "goerw/walk.hpp"

namespace goerw {

/// One draw of the ruin percolation. Edges are indexed by child id; entry 0
/// (the root) is unused.
struct PercolationSample {
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> open;
    std::vector<std::uint8_t> in_cluster;
    bool valid = true;               // false if any extension hit the step cap
    std::size_t capped_edges = 0;
};

/// Every edge (v^-1, v) up to the truncation depth is open iff X^(v) reaches
/// v before returning to the root; all extensions read ClockTable(seed).
PercolationSample sample_ruin_percolation(const Tree& tree, const Environment& env, std::uint64_t seed,
                                          std::uint64_t step_cap = kDefaultStepCap);

/// Lazily evaluates open/in-cluster status for single edges under one clock
/// table, memoizing along root paths. Reusable across samples via reset().
class ClusterProbe {
public:
    ClusterProbe(const Tree& tree, const Environment& env, std::uint64_t step_cap = kDefaultStepCap);

    void reset(std::uint64_t seed);
    bool open(VertexId e);
    bool in_cluster(VertexId e);
    bool valid() const noexcept { return valid_; }

private:
    const Tree& tree_;
    const Environment& env_;
    std::uint64_t step_cap_;
    ClockTable clocks_{0};
    ExtensionScratch scratch_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint8_t> state_;
    std::uint32_t epoch_ = 0;
    bool valid_ = true;
};

/// Binomial estimate of P(e in the root cluster). Trial i uses the clocks of
/// sample_ruin_percolation(derive_seed(master_seed, i)); invalid trials are
/// excluded and counted.
BinomialEstimate edge_connection_probability_mc(const Tree& tree, const Environment& env, VertexId e,
                                                std::uint64_t trials, std::uint64_t master_seed);

/// c(e) = 1 at depth 1, Psi(e)/(1 - psi(e)) deeper, +inf when psi(e) = 1.
double adapted_conductance(const Tree& tree, const Environment& env, VertexId e);

struct QuasiIndependenceResult {
    VertexId conditioning_edge = kNoVertex;  // last common edge; kNoVertex if e1, e2 meet at the root
    std::uint64_t trials = 0;
    std::uint64_t conditioning_hits = 0;
    std::uint64_t excluded = 0;
    double p1 = 0.0;  // P(e1 in C | e in C)
    double p2 = 0.0;
    double joint = 0.0;        // P(e1, e2 in C | e in C)
    double product = 0.0;      // p1 * p2
    double ratio = 0.0;        // joint / product
    double ratio_se = 0.0;     // delta-method standard error of the ratio
    double excess_se = 0.0;    // standard error of joint - M * product
    double K = 0.0;
    double M = 0.0;
    bool bound_holds = false;  // joint <= M * product + 3 excess_se
};

/// Conditioning is by rejection. Refuses (RareEvent) when fewer than 50
/// samples have the conditioning edge in the cluster.
QuasiIndependenceResult quasi_independence_statistic(const Tree& tree, const Environment& env, VertexId e1,
                                                     VertexId e2, std::uint64_t trials, std::uint64_t master_seed);

struct ConcentrationRow {
    std::uint32_t depth = 0;
    VertexId edge = kNoVertex;
    std::uint64_t failures = 0;  // samples where B_e fails
    std::uint64_t samples = 0;
    double frequency() const noexcept;
    double std_error() const noexcept;
};

/// Whether B_e holds for a single Psi value.
bool concentration_event_holds(double Psi_e, std::uint32_t depth, double m, double kappa, double epsilon);

/// Frequency of B_e failing across fresh environments, one row per depth,
/// using the lowest-id edge at each depth. Environment s uses seed
/// derive_seed(master_seed, s).
std::vector<ConcentrationRow> concentration_experiment(const Tree& tree, const AlphaDistribution& dist,
                                                       double epsilon, std::span<const std::uint32_t> depths,
                                                       std::uint64_t env_samples, std::uint64_t master_seed);

/// freq[i+1] <= freq[i] + k * sqrt(se_i^2 + se_{i+1}^2) for every row after
/// the first `burn_in` rows.
bool nonincreasing_within_noise(std::span<const ConcentrationRow> rows, double k_sigma, std::size_t burn_in = 0);

/// CSV header + rows: parent,child,open,in_cluster,sample_index.
void write_percolation_csv(std::ostream& out, const Tree& tree, std::span<const PercolationSample> samples,
                           std::uint64_t first_index = 0);

}  // namespace goerw
