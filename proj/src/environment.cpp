#include "goerw/environment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "goerw/error.hpp"
#include "goerw/format.hpp"
#include "goerw/rng.hpp"

namespace goerw {

namespace {

void check_support(const std::vector<double>& values, const std::vector<double>& probs) {
    require(!values.empty(), "alpha distribution needs at least one support point");
    require(values.size() == probs.size(), "alpha distribution: values and probabilities differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]) && values[i] >= 0.0, "alpha values must be finite and >= 0");
        require(probs[i] >= 0.0 && probs[i] <= 1.0, "alpha probabilities must lie in [0, 1]");
        total += probs[i];
    }
    require(std::abs(total - 1.0) <= 1e-12, "alpha probabilities must sum to 1");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    return out;
}

}  // namespace

AlphaDistribution AlphaDistribution::point(double a) {
    AlphaDistribution d;
    d.shape_ = Shape::Point;
    d.values_ = {a};
    d.probs_ = {1.0};
    check_support(d.values_, d.probs_);
    return d;
}

AlphaDistribution AlphaDistribution::two_point(double a1, double a2, double p1) {
    AlphaDistribution d;
    d.shape_ = Shape::TwoPoint;
    d.values_ = {a1, a2};
    d.probs_ = {p1, 1.0 - p1};
    check_support(d.values_, d.probs_);
    return d;
}

AlphaDistribution AlphaDistribution::discrete(std::vector<double> values, std::vector<double> probs) {
    AlphaDistribution d;
    d.shape_ = Shape::Discrete;
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    check_support(d.values_, d.probs_);
    return d;
}

double AlphaDistribution::m() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        m += probs_[i] / (values_[i] + 1.0);
    return m;
}

double AlphaDistribution::max_value() const {
    double mx = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (probs_[i] > 0.0)
            mx = std::max(mx, values_[i]);
    return mx;
}

double AlphaDistribution::quantile(double u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        acc += probs_[i];
        if (u < acc)
            return values_[i];
    }
    return values_.back();
}

std::string AlphaDistribution::spec() const {
    switch (shape_) {
        case Shape::Point:
            return "point=" + format_double(values_[0]);
        case Shape::TwoPoint:
            return "two=" + format_double(values_[0]) + "," + format_double(values_[1]) + "," +
                   format_double(probs_[0]);
        case Shape::Discrete: {
            std::string s = "discrete=";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i)
                    s += ',';
                s += format_double(values_[i]) + ":" + format_double(probs_[i]);
            }
            return s;
        }
    }
    return {};
}

AlphaDistribution AlphaDistribution::parse(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        fail(ErrorKind::Parse, "alpha distribution '" + spec + "' must look like point=a, two=a1,a2,p or discrete=v:p,...");
    const std::string kind = spec.substr(0, eq);
    const std::string body = spec.substr(eq + 1);
    if (kind == "point")
        return point(parse_double(body, "alpha point mass"));
    if (kind == "two") {
        const auto parts = split(body, ',');
        if (parts.size() != 3)
            fail(ErrorKind::Parse, "two-point alpha needs 'two=a1,a2,p'");
        return two_point(parse_double(parts[0], "alpha a1"), parse_double(parts[1], "alpha a2"),
                         parse_double(parts[2], "alpha p"));
    }
    if (kind == "discrete") {
        std::vector<double> v, p;
        for (const auto& item : split(body, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                fail(ErrorKind::Parse, "discrete alpha entries must be value:prob, got '" + item + "'");
            v.push_back(parse_double(item.substr(0, colon), "alpha value"));
            p.push_back(parse_double(item.substr(colon + 1), "alpha probability"));
        }
        return discrete(std::move(v), std::move(p));
    }
    fail(ErrorKind::Parse, "unknown alpha distribution kind '" + kind + "' (expected point, two or discrete)");
}

bool Environment::is_oerw() const {
    return std::all_of(mu_.begin(), mu_.end(), [](double m) { return m == 1.0; });
}

Environment assign_deterministic(const Tree& tree, const std::function<double(VertexId)>& lambda_rule,
                                 const std::function<double(VertexId)>& mu_rule) {
    Environment env;
    env.lambda_.assign(tree.size(), 1.0);
    env.mu_.assign(tree.size(), 1.0);
    for (VertexId v = 1; v < tree.size(); ++v) {
        const double l = lambda_rule(v);
        const double m = mu_rule(v);
        require(std::isfinite(l) && l > 0.0,
                "lambda at vertex " + std::to_string(v) + " must be positive and finite (got " + format_double(l) + ")");
        require(std::isfinite(m) && m > 0.0,
                "mu at vertex " + std::to_string(v) + " must be positive and finite (got " + format_double(m) + ")");
        env.lambda_[v] = l;
        env.mu_[v] = m;
    }
    return env;
}

Environment environment_from_alpha(const Tree& tree, std::vector<double> alpha, const AlphaDistribution& dist,
                                   std::optional<std::uint64_t> seed) {
    require(alpha.size() == tree.size(), "alpha field must have one entry per vertex");
    Environment env;
    env.lambda_.assign(tree.size(), 1.0);
    env.mu_.assign(tree.size(), 1.0);
    alpha[0] = 0.0;
    for (VertexId v = 1; v < tree.size(); ++v) {
        require(std::isfinite(alpha[v]) && alpha[v] >= 0.0,
                "alpha at vertex " + std::to_string(v) + " must be finite and >= 0");
        env.lambda_[v] = 1.0 + alpha[v] * static_cast<double>(tree.degree(v));
    }
    env.alpha_ = std::move(alpha);
    env.m_ = dist.m();
    env.seed_ = seed;
    env.dist_ = dist;
    return env;
}

Environment sample_random_environment(const Tree& tree, const AlphaDistribution& dist, std::uint64_t seed) {
    std::vector<double> alpha(tree.size(), 0.0);
    const std::uint64_t base = mix64(seed ^ 0xa1fa'a1fa'a1fa'a1faULL);
    for (VertexId v = 1; v < tree.size(); ++v)
        alpha[v] = dist.quantile(to_unit(hash_combine(base, v)));
    return environment_from_alpha(tree, std::move(alpha), dist, seed);
}

Environment environment_from_columns(std::vector<double> lambda, std::vector<double> mu) {
    require(!lambda.empty() && lambda.size() == mu.size(), "lambda and mu columns must have equal, nonzero length");
    for (std::size_t v = 1; v < lambda.size(); ++v) {
        require(std::isfinite(lambda[v]) && lambda[v] > 0.0, "lambda at vertex " + std::to_string(v) + " must be > 0");
        require(std::isfinite(mu[v]) && mu[v] > 0.0, "mu at vertex " + std::to_string(v) + " must be > 0");
    }
    Environment env;
    lambda[0] = 1.0;
    mu[0] = 1.0;
    env.lambda_ = std::move(lambda);
    env.mu_ = std::move(mu);
    return env;
}

double resistance(const Tree& tree, const Environment& env, VertexId edge_child) {
    require(edge_child != Tree::root() && edge_child < tree.size(), "resistance: not an edge");
    // Product over the edges {z^-1, z} of P_e of mu at the upper endpoint z^-1.
    double r = 1.0;
    for (VertexId z = edge_child; z != Tree::root(); z = tree.parent(z))
        r *= env.mu(tree.parent(z));
    return r;
}

double phi(const Tree& tree, const Environment& env, VertexId x) {
    require(x < tree.size(), "phi: vertex not in the tree");
    // Walk P_x from the root, carrying R of the current edge.
    const auto path = tree.path_from_root(x);
    double s = 0.0, r = 1.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        r *= env.mu(path[i - 1]);
        s += r;
    }
    return s;
}

namespace {

double psi_from(double phi_grandparent, double phi_u, double lambda_p, double mu_p, std::uint32_t deg_p) {
    const double ratio = phi_grandparent / phi_u;
    const double d = static_cast<double>(deg_p);
    const double excited = lambda_p + (d - 2.0) * mu_p / (mu_p + 1.0);
    return 1.0 - (1.0 - ratio) * excited / (lambda_p + d - 1.0);
}

}  // namespace

double psi(const Tree& tree, const Environment& env, VertexId u) {
    require(u != Tree::root() && u < tree.size(), "psi: not an edge");
    if (tree.depth(u) == 1)
        return 1.0;
    const VertexId p = tree.parent(u);
    const VertexId g = tree.parent(p);
    return psi_from(phi(tree, env, g), phi(tree, env, u), env.lambda(p), env.mu(p), tree.degree(p));
}

double Psi(const Tree& tree, const Environment& env, VertexId edge_child) {
    double log_sum = 0.0;
    for (VertexId z = edge_child; z != Tree::root(); z = tree.parent(z))
        log_sum += std::log(psi(tree, env, z));
    return std::exp(log_sum);
}

double psi_oerw_closed_form(double parent_alpha, std::uint32_t n) {
    require(n >= 2, "closed-form psi applies to depth >= 2");
    return 1.0 - (2.0 * parent_alpha + 1.0) / (static_cast<double>(n) * (parent_alpha + 1.0));
}

RuinProfile::RuinProfile(const Tree& tree, const Environment& env)
    : depth_(tree.size()),
      R_(tree.size(), 0.0),
      phi_(tree.size(), 0.0),
      psi_(tree.size(), 1.0),
      log_Psi_(tree.size(), 0.0) {
    require(env.size() == tree.size(), "environment and tree sizes differ");
    // Top-down: R(v) = R(parent) * mu(parent of v), phi(v) = phi(parent) + R(v).
    for (std::uint32_t n = 1; n <= tree.truncation_depth(); ++n) {
        for (VertexId v : tree.level(n)) {
            const VertexId p = tree.parent(v);
            depth_[v] = n;
            R_[v] = (n == 1 ? 1.0 : R_[p]) * env.mu(p);
            phi_[v] = phi_[p] + R_[v];
            if (n >= 2)
                psi_[v] = psi_from(phi_[tree.parent(p)], phi_[v], env.lambda(p), env.mu(p), tree.degree(p));
            log_Psi_[v] = log_Psi_[p] + std::log(psi_[v]);
        }
    }
}

double RuinProfile::Psi(VertexId e) const { return std::exp(log_Psi_[e]); }

double RuinProfile::Psi_pow(VertexId e, double gamma) const { return std::exp(gamma * log_Psi_[e]); }

double RuinProfile::adapted_conductance(VertexId e) const {
    require(e != Tree::root() && e < R_.size(), "adapted_conductance: not an edge");
    if (depth_[e] == 1)
        return 1.0;
    const double closed = 1.0 - psi_[e];
    if (closed <= 0.0)
        return std::numeric_limits<double>::infinity();
    return Psi(e) / closed;
}

double rt_hypothesis_sup(const Tree& tree, const Environment& env) {
    if (tree.truncation_depth() < 2) {
        std::clog << "warning: rt_hypothesis_sup on a tree of depth < 2; supremum is empty, returning 0\n";
        return 0.0;
    }
    const RuinProfile prof(tree, env);
    double sup = 0.0;
    for (std::uint32_t n = 2; n <= tree.truncation_depth(); ++n)
        for (VertexId v : tree.level(n))
            sup = std::max(sup, prof.resistance(v) / prof.phi(tree.parent(v)));
    return sup;
}

QuasiIndependenceConstants quasi_independence_constants(const Tree& tree, const Environment& env) {
    const double K = 2.0 + rt_hypothesis_sup(tree, env);
    return {K, (1.0 + K) * (1.0 + K) * std::exp(2.0 * K)};
}

double kappa(const Tree& tree, const Environment& env) {
    require(env.has_alpha(), "kappa needs an alpha field");
    double mx = 0.0;
    for (VertexId c : tree.children(Tree::root()))
        mx = std::max(mx, env.alpha(c));
    return 1.0 + mx;
}

TrendEstimate rt_estimate(const std::function<TreeWithEnvironment(std::uint32_t)>& family,
                          std::span<const double> gamma_grid, double threshold,
                          std::span<const std::uint32_t> depths) {
    return trend_estimate(
        [&](double gamma, std::uint32_t L) {
            const auto te = family(L);
            const RuinProfile prof(te.tree, te.env);
            return min_cutset_sum(te.tree, EdgeWeighting::from(te.tree, [&](Edge e) {
                                      return prof.Psi_pow(e.child, gamma);
                                  }))
                .value;
        },
        gamma_grid, threshold, depths);
}

}  // namespace goerw
