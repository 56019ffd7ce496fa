#pragma once

#include <cmath>
#include <cstdint>

#include "goerw/rng.hpp"
#include "goerw/tree.hpp"

namespace goerw {

/// The family xi(v, u, j) of rate-1 exponential clocks on oriented edges.
///
/// Values are key-addressed: xi(v, u, j) is a pure function of (master seed,
/// v, u, j), so the walk and every path extension built from the same table
/// see identical clocks regardless of the order in which they read them.
/// Nothing is stored, which makes a table trivially copyable and shareable.
class ClockTable {
public:
    explicit ClockTable(std::uint64_t master_seed) noexcept
        : seed_(master_seed), base_(mix64(master_seed ^ 0xc10c'c10c'c10c'c10cULL)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    double operator()(VertexId v, VertexId u, std::uint32_t j) const noexcept {
        const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | j;
        return -std::log(to_unit_open_closed(hash_combine(hash_combine(base_, v), key)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t base_;
};

}  // namespace goerw
