#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "goerw/clocks.hpp"
#include "goerw/environment.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

namespace goerw {

inline constexpr std::uint64_t kDefaultStepCap = 100'000'000;

/// The walk stops at the first rule that fires. Reaching a truncation leaf
/// always stops it (flagged as an escape).
struct StopRule {
    std::optional<std::uint64_t> max_steps;
    std::optional<std::uint32_t> returns_to_root;  // stop on the k-th return to the root
    std::optional<std::uint32_t> hit_depth;
    std::optional<VertexId> hit_vertex;
    std::uint64_t step_cap = kDefaultStepCap;
    bool record_positions = true;
};

enum class StopReason { MaxSteps, ReturnsToRoot, HitDepth, HitVertex, Escaped, StepCap };

const char* to_string(StopReason r) noexcept;

struct WalkTrajectory {
    std::vector<VertexId> positions;  // X_0..X_n; empty when not recorded
    std::uint64_t steps = 0;
    std::uint32_t returns_to_root = 0;
    std::uint32_t max_depth = 0;
    VertexId final_position = 0;
    bool escaped = false;    // reached a truncation leaf
    bool truncated = false;  // stopped by the hard step cap
    StopReason reason = StopReason::MaxSteps;
    std::optional<std::uint64_t> first_return;  // tau_root^+

    // Z_n and C_n at the final time, kept alongside the positions so they
    // can be cross-checked. visits[x] = Z_n(x); up[v] counts v -> parent,
    // down[v] counts parent -> v.
    std::vector<std::uint32_t> visits;
    std::vector<std::uint32_t> up;
    std::vector<std::uint32_t> down;

    std::optional<std::uint64_t> first_hit(VertexId v) const;
    /// C_n(a, b) for adjacent a, b.
    std::uint32_t crossings(const Tree& tree, VertexId a, VertexId b) const;
};

/// Adjacency of consecutive positions and agreement of the stored Z/C with
/// counts recomputed from the positions.
bool trajectory_is_consistent(const Tree& tree, const WalkTrajectory& t);

struct Rates {
    double r_lambda = 0.0;
    double r_mu = 0.0;
};

/// r_lambda(v, u) and r_mu(v, u) for adjacent v, u.
Rates rates(const Tree& tree, const Environment& env, VertexId v, VertexId u);

/// Transition probabilities out of v given Z_n(v) = `visits_at_v` (>= 1).
/// Returned as (neighbor, probability) with the parent first.
std::vector<std::pair<VertexId, double>> transition_law(const Tree& tree, const Environment& env, VertexId v,
                                                        std::uint32_t visits_at_v);

/// One draw from the transition law.
VertexId step_direct(const Tree& tree, const Environment& env, VertexId v, std::uint32_t visits_at_v,
                     SplitMix64& rng);

/// Simulation by repeated direct draws.
WalkTrajectory simulate(const Tree& tree, const Environment& env, const StopRule& stop, std::uint64_t seed);

/// Rubin's construction: argmins of exponential clocks scaled by edge rates.
WalkTrajectory simulate_rubin(const Tree& tree, const Environment& env, const ClockTable& clocks,
                              const StopRule& stop);

/// The extension X^(v) on P_v, reading the same clocks as simulate_rubin.
/// Positions are vertex ids on P_v. The walk reflects at v.
WalkTrajectory simulate_extension(const Tree& tree, const Environment& env, VertexId v, const ClockTable& clocks,
                                  const StopRule& stop);

enum class ExtensionOutcome { HitTarget, ReturnedToRoot, StepCap };

/// Runs X^(v) until it first hits v or returns to the root. Reuses `scratch`
/// across calls to avoid allocation in percolation loops.
struct ExtensionScratch;
ExtensionOutcome extension_first_passage(const Tree& tree, const Environment& env, VertexId v,
                                         const ClockTable& clocks, std::uint64_t step_cap,
                                         ExtensionScratch& scratch);

struct ExtensionScratch {
    std::vector<VertexId> path;
    std::vector<std::uint32_t> visits;
    std::vector<std::uint8_t> offset;  // 2 slots per path vertex: parent, on-path child
    std::vector<std::uint32_t> count;
    std::vector<double> next;
};

struct Restriction {
    std::vector<VertexId> positions;
    std::size_t killing_time = 0;  // K_B = positions.size() - 1
};

/// The restriction of a trajectory to `in_set` (indexed by vertex id):
/// successive visits to the set with consecutive repeats collapsed.
Restriction restriction(std::span<const VertexId> positions, const std::vector<bool>& in_set);

/// Membership mask of P_v.
std::vector<bool> path_mask(const Tree& tree, VertexId v);

}  // namespace goerw
