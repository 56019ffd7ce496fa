#pragma once

#include <cstdint>
#include <iosfwd>

#include "goerw/environment.hpp"
#include "goerw/tree.hpp"
#include "goerw/walk.hpp"

namespace goerw {

/// "# goerw-tree v1 depth=<L>" followed by "parent child" lines in
/// breadth-first order.
void write_tree(std::ostream& out, const Tree& tree);
Tree read_tree(std::istream& in);

/// "# goerw-env v1 seed=<s> dist=<spec> m=<value>" followed by
/// "vertex lambda mu [alpha]" lines. Missing metadata is written as "-".
void write_environment(std::ostream& out, const Environment& env);
/// Alpha columns, when present with a distribution in the header, are
/// re-validated against lambda = 1 + alpha deg.
Environment read_environment(std::istream& in, const Tree& tree);

/// One vertex id per line.
void write_trajectory(std::ostream& out, const WalkTrajectory& t);

inline constexpr const char* kTrajectorySummaryHeader = "seed,steps,returns_to_root,max_depth,escaped";
/// One CSV row (no header).
void write_trajectory_summary(std::ostream& out, std::uint64_t seed, const WalkTrajectory& t);

}  // namespace goerw
