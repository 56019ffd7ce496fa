#pragma once

// Reference computations that do not go through the library's formulas.

#include <cstdint>
#include <vector>

namespace oracle {

// Probability that the extension walk along a path 0..d reaches d before
// returning to 0. Vertex k (1 <= k < d) has bias pair (lambda[k], mu[k]) and
// degree deg[k] in the full tree; the walk follows the once-excited rule,
// with an off-path first step resolved by the later-visit rule on the path.
// Solved exactly by backward induction over the running maximum.
inline double extension_success(const std::vector<double>& lambda, const std::vector<double>& mu,
                                const std::vector<std::uint32_t>& deg, std::uint32_t d) {
    if (d == 1)
        return 1.0;
    // g = success probability on a fresh arrival at M, iterated from M = d down to 1.
    double g_next = 1.0;  // g(d)
    for (std::uint32_t M = d - 1; M >= 1; --M) {
        // Non-fresh states 1..M form a birth-death chain with h(0) = 0 and
        // h(M+1) = g(M+1). h(k) = a_k * g(M+1), solved by the standard
        // potential: a_k = phi(k)/phi(M+1) with phi(k) = sum_{j<k} prod_{h=1}^{j} r_h, r = q/p = mu.
        std::vector<double> phi(M + 2, 0.0);
        double prod = 1.0;
        for (std::uint32_t k = 1; k <= M + 1; ++k) {
            phi[k] = phi[k - 1] + prod;
            if (k <= M)
                prod *= mu[k];
        }
        auto a = [&](std::uint32_t k) { return phi[k] / phi[M + 1]; };
        const double l = lambda[M], m = mu[M];
        const double total = l + deg[M] - 1;
        const double off = (deg[M] - 2.0) / total;
        const double to_parent = l / total + off * m / (m + 1.0);
        const double to_child = 1.0 / total + off / (m + 1.0);
        // From the fresh state: parent goes to non-fresh M-1 (value a(M-1) g(M+1)).
        const double g = to_parent * a(M - 1) * g_next + to_child * g_next;
        g_next = g;
        if (M == 1)
            break;
    }
    return g_next;
}

}  // namespace oracle
