#include "goerw/io.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "goerw/error.hpp"
#include "goerw/format.hpp"

namespace goerw {

namespace {

// "key=value" tokens after a fixed "# goerw-<kind> v1" prefix.
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& kind) {
    std::istringstream ss(line);
    std::string hash, tag, version;
    ss >> hash >> tag >> version;
    if (hash != "#" || tag != "goerw-" + kind || version != "v1")
        fail(ErrorKind::Parse, "missing '# goerw-" + kind + " v1' header");
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Parse, "malformed header field '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

bool blank_or_comment(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

}  // namespace

void write_tree(std::ostream& out, const Tree& tree) {
    out << "# goerw-tree v1 depth=" << tree.truncation_depth() << '\n';
    for (const auto& e : tree.edges_bfs())
        out << e.parent << ' ' << e.child << '\n';
}

Tree read_tree(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::Parse, "empty tree file");
    const auto header = parse_header(line, "tree");
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line))
            continue;
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a >> b) || (ss >> extra))
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'parent child'");
        edges.emplace_back(parse_int<VertexId>(a, "parent id"), parse_int<VertexId>(b, "child id"));
    }
    Tree tree = build_from_edge_list(edges);
    if (auto it = header.find("depth"); it != header.end()) {
        const auto L = parse_int<std::uint32_t>(it->second, "depth");
        if (L != tree.truncation_depth())
            fail(ErrorKind::Parse, "header depth " + it->second + " does not match the edges (depth " +
                                       std::to_string(tree.truncation_depth()) + ")");
    }
    return tree;
}

void write_environment(std::ostream& out, const Environment& env) {
    out << "# goerw-env v1 seed=" << (env.seed() ? std::to_string(*env.seed()) : "-")
        << " dist=" << (env.distribution() ? env.distribution()->spec() : "-")
        << " m=" << (env.m() ? format_double(*env.m()) : "-") << '\n';
    for (VertexId v = 0; v < env.size(); ++v) {
        out << v << ' ' << format_double(env.lambda(v)) << ' ' << format_double(env.mu(v));
        if (env.has_alpha())
            out << ' ' << format_double(env.alpha(v));
        out << '\n';
    }
}

Environment read_environment(std::istream& in, const Tree& tree) {
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::Parse, "empty environment file");
    const auto header = parse_header(line, "env");
    std::vector<double> lambda(tree.size()), mu(tree.size()), alpha(tree.size());
    std::vector<bool> seen(tree.size(), false);
    std::size_t with_alpha = 0, lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line))
            continue;
        std::istringstream ss(line);
        std::vector<std::string> cols;
        for (std::string tok; ss >> tok;)
            cols.push_back(tok);
        if (cols.size() != 3 && cols.size() != 4)
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'vertex lambda mu [alpha]'");
        const auto v = parse_int<VertexId>(cols[0], "vertex id");
        if (v >= tree.size() || seen[v])
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": vertex " + cols[0] +
                                       (v >= tree.size() ? " is not in the tree" : " appears twice"));
        seen[v] = true;
        lambda[v] = parse_double(cols[1], "lambda");
        mu[v] = parse_double(cols[2], "mu");
        if (cols.size() == 4) {
            alpha[v] = parse_double(cols[3], "alpha");
            ++with_alpha;
        }
    }
    for (VertexId v = 0; v < tree.size(); ++v)
        if (!seen[v])
            fail(ErrorKind::Parse, "vertex " + std::to_string(v) + " has no environment line");

    const auto dist_it = header.find("dist");
    if (with_alpha == tree.size() && dist_it != header.end() && dist_it->second != "-") {
        std::optional<std::uint64_t> seed;
        if (auto it = header.find("seed"); it != header.end() && it->second != "-")
            seed = parse_int<std::uint64_t>(it->second, "seed");
        Environment env = environment_from_alpha(tree, alpha, AlphaDistribution::parse(dist_it->second), seed);
        for (VertexId v = 1; v < tree.size(); ++v)
            if (std::abs(env.lambda(v) - lambda[v]) > 1e-12 * std::abs(lambda[v]) || env.mu(v) != mu[v])
                fail(ErrorKind::Parse, "vertex " + std::to_string(v) + ": lambda/mu disagree with alpha");
        return env;
    }
    return environment_from_columns(std::move(lambda), std::move(mu));
}

void write_trajectory(std::ostream& out, const WalkTrajectory& t) {
    for (VertexId x : t.positions)
        out << x << '\n';
}

void write_trajectory_summary(std::ostream& out, std::uint64_t seed, const WalkTrajectory& t) {
    out << seed << ',' << t.steps << ',' << t.returns_to_root << ',' << t.max_depth << ',' << (t.escaped ? 1 : 0)
        << '\n';
}

}  // namespace goerw
