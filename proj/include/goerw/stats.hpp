#pragma once

#include <cmath>
#include <cstdint>

namespace goerw {

/// Binomial proportion with its normal-approximation standard error.
struct BinomialEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    std::uint64_t excluded = 0;  // invalid samples dropped before counting

    double estimate() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
    }
    double std_error() const noexcept {
        if (trials == 0)
            return 0.0;
        const double p = estimate();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
    /// |estimate - target| <= k * SE, with SE evaluated at the target so an
    /// estimate of exactly 0 or 1 is not trivially accepted.
    bool within(double target, double k) const noexcept {
        if (trials == 0)
            return false;
        const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(trials));
        return std::abs(estimate() - target) <= k * se;
    }
};

}  // namespace goerw
