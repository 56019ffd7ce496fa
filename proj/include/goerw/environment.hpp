#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goerw/cutset.hpp"
#include "goerw/tree.hpp"

namespace goerw {

/// Law of the i.i.d. excitation strengths alpha_v. Point masses and two-point
/// laws are normalized into the finite discrete form on construction.
class AlphaDistribution {
public:
    static AlphaDistribution point(double a);
    static AlphaDistribution two_point(double a1, double a2, double p1);
    static AlphaDistribution discrete(std::vector<double> values, std::vector<double> probs);

    /// m = E[1/(alpha+1)], evaluated exactly from the support.
    double m() const noexcept;
    double max_value() const;

    /// Inverse-CDF draw from a uniform in [0,1).
    double quantile(double u) const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> probs() const noexcept { return probs_; }

    /// "point=1", "two=0,3,0.5" or "discrete=0:0.25,1:0.75".
    std::string spec() const;
    static AlphaDistribution parse(const std::string& spec);

private:
    enum class Shape { Point, TwoPoint, Discrete };
    Shape shape_ = Shape::Point;
    std::vector<double> values_;
    std::vector<double> probs_;
};

/// Per-vertex bias pairs (lambda_v, mu_v) on a fixed tree. The root always
/// carries lambda = mu = 1.
class Environment {
public:
    Environment() = default;

    std::size_t size() const noexcept { return lambda_.size(); }
    double lambda(VertexId v) const { return lambda_[v]; }
    double mu(VertexId v) const { return mu_[v]; }

    bool has_alpha() const noexcept { return !alpha_.empty(); }
    double alpha(VertexId v) const { return alpha_.at(v); }
    std::optional<double> m() const noexcept { return m_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    const std::optional<AlphaDistribution>& distribution() const noexcept { return dist_; }

    /// mu_v == 1 for all v.
    bool is_oerw() const;

    friend Environment assign_deterministic(const Tree&, const std::function<double(VertexId)>&,
                                            const std::function<double(VertexId)>&);
    friend Environment sample_random_environment(const Tree&, const AlphaDistribution&, std::uint64_t);
    friend Environment environment_from_alpha(const Tree&, std::vector<double>, const AlphaDistribution&,
                                              std::optional<std::uint64_t>);
    friend Environment environment_from_columns(std::vector<double>, std::vector<double>);

private:
    std::vector<double> lambda_;
    std::vector<double> mu_;
    std::vector<double> alpha_;
    std::optional<double> m_;
    std::optional<std::uint64_t> seed_;
    std::optional<AlphaDistribution> dist_;
};

/// Deterministic rules; root values are forced to 1. Nonpositive or non-finite
/// values are rejected naming the vertex.
Environment assign_deterministic(const Tree& tree, const std::function<double(VertexId)>& lambda_rule,
                                 const std::function<double(VertexId)>& mu_rule);

/// lambda_v = 1 + alpha_v deg(v), mu_v = 1, alpha_v i.i.d. from `dist`. The
/// draw for vertex v depends only on (seed, v), so the same seed yields a
/// consistent environment across truncation depths of a breadth-first family.
Environment sample_random_environment(const Tree& tree, const AlphaDistribution& dist, std::uint64_t seed);

/// Environment with prescribed alpha field (alpha[0] ignored).
Environment environment_from_alpha(const Tree& tree, std::vector<double> alpha, const AlphaDistribution& dist,
                                   std::optional<std::uint64_t> seed = std::nullopt);

/// Raw (lambda, mu) columns, e.g. read back from a file.
Environment environment_from_columns(std::vector<double> lambda, std::vector<double> mu);

// Direct evaluation from the definitions; each walks the root path, O(|x|).

/// R(e) = product of mu_{z^-1} over the edges {z^-1, z} of P_e.
double resistance(const Tree& tree, const Environment& env, VertexId edge_child);
/// phi(x) = sum of R over the edges of P_x; phi(root) = 0.
double phi(const Tree& tree, const Environment& env, VertexId x);
/// psi(u^-1, u): 1 for |u| = 1, the ruin factor otherwise. Always in (0, 1].
double psi(const Tree& tree, const Environment& env, VertexId u);
/// Psi(e) = product of psi(g) for g <= e, accumulated in log space.
double Psi(const Tree& tree, const Environment& env, VertexId edge_child);

/// psi for mu == 1 and lambda = 1 + alpha deg: 1 - (1/n)(2 alpha + 1)/(alpha + 1),
/// with alpha the parent's strength and n = |u| >= 2.
double psi_oerw_closed_form(double parent_alpha, std::uint32_t n);

/// All of R, phi, psi, log Psi for every vertex, filled root-to-leaves in one
/// pass. Immutable after construction, so it can be shared across threads.
class RuinProfile {
public:
    RuinProfile(const Tree& tree, const Environment& env);

    double resistance(VertexId e) const { return R_[e]; }
    double phi(VertexId x) const { return phi_[x]; }
    double psi(VertexId e) const { return psi_[e]; }
    double log_Psi(VertexId e) const { return log_Psi_[e]; }
    double Psi(VertexId e) const;
    double Psi_pow(VertexId e, double gamma) const;

    /// c(e) = 1 at depth 1, Psi(e)/(1 - psi(e)) deeper; +inf when psi(e) == 1.
    double adapted_conductance(VertexId e) const;

    std::size_t size() const noexcept { return R_.size(); }

private:
    std::vector<std::uint32_t> depth_;
    std::vector<double> R_;
    std::vector<double> phi_;
    std::vector<double> psi_;
    std::vector<double> log_Psi_;
};

/// sup over |v| >= 2 of R(v^-1, v) / phi(v^-1). 0 (with a warning on stderr)
/// when the tree has depth < 2.
double rt_hypothesis_sup(const Tree& tree, const Environment& env);

/// K = 2 + sup R/phi and M = (1 + K)^2 exp(2K) from the quasi-independence bound.
struct QuasiIndependenceConstants {
    double K = 0.0;
    double M = 0.0;
};
QuasiIndependenceConstants quasi_independence_constants(const Tree& tree, const Environment& env);

/// kappa = 1 + max alpha over the root's children.
double kappa(const Tree& tree, const Environment& env);

struct TreeWithEnvironment {
    Tree tree;
    Environment env;
};

/// Trend estimate of RT(T, lambda, mu) with weights Psi(e)^gamma.
TrendEstimate rt_estimate(const std::function<TreeWithEnvironment(std::uint32_t)>& family,
                          std::span<const double> gamma_grid, double threshold,
                          std::span<const std::uint32_t> depths);

}  // namespace goerw
