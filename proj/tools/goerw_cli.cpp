// goerw: experiment runner for once-excited random walks on trees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "goerw/analysis.hpp"
#include "goerw/cutset.hpp"
#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/format.hpp"
#include "goerw/io.hpp"
#include "goerw/percolation.hpp"
#include "goerw/rng.hpp"
#include "goerw/tree.hpp"
#include "goerw/walk.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace goerw;

namespace {

constexpr int kExitRefusal = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kSubcommands = {"gen-tree",   "compute-psi", "simulate",   "percolate",
                                               "estimate-br", "estimate-rt", "flow-check", "phase-scan",
                                               "gambler",     "concentration"};

// ---------------------------------------------------------------- specs

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

// "family:k=v,k=v" -> (family, {k: v}); keys outside `allowed` are rejected.
std::pair<std::string, std::map<std::string, std::string>> parse_spec(const std::string& spec, const std::string& what) {
    const auto colon = spec.find(':');
    std::string family = spec.substr(0, colon);
    std::map<std::string, std::string> kv;
    if (colon == std::string::npos)
        return {family, kv};
    for (const auto& tok : split(spec.substr(colon + 1), ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorKind::Parse, what + " spec '" + spec + "': expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return {family, kv};
}

void only_keys(const std::map<std::string, std::string>& kv, std::initializer_list<const char*> allowed,
               const std::string& what) {
    for (const auto& [k, v] : kv)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            fail(ErrorKind::Parse, "unknown key '" + k + "' in " + what + " spec");
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
    std::vector<T> out;
    for (const auto& tok : split(s, ',')) {
        if constexpr (std::is_floating_point_v<T>)
            out.push_back(parse_double(tok, what));
        else
            out.push_back(parse_int<T>(tok, what));
    }
    if (out.empty())
        fail(ErrorKind::Parse, what + " list is empty");
    return out;
}

// "0.5,1,1.5" or "lo:hi:step".
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(':') == std::string::npos)
        return parse_list<double>(s, "--gamma-grid");
    const auto parts = split(s, ':');
    if (parts.size() != 3)
        fail(ErrorKind::Parse, "--gamma-grid range must be lo:hi:step");
    const double lo = parse_double(parts[0], "--gamma-grid"), hi = parse_double(parts[1], "--gamma-grid"),
                 step = parse_double(parts[2], "--gamma-grid");
    if (!(step > 0) || hi < lo)
        fail(ErrorKind::Parse, "--gamma-grid range needs lo <= hi and step > 0");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double x = lo + i * step;
        if (x > hi + 1e-9 * step)
            break;
        g.push_back(std::round(x * 1e9) / 1e9);
    }
    return g;
}

struct TreeSpec {
    std::string text;
    std::string family;
    double b = 0.0;
    std::uint32_t d = 0;
    std::optional<std::uint32_t> L;
    std::vector<double> pmf;
    std::uint64_t seed = 0;
    std::string path;

    static TreeSpec parse(const std::string& text) {
        if (text.empty())
            fail(ErrorKind::Parse, "--tree is required");
        TreeSpec t;
        t.text = text;
        auto [family, kv] = parse_spec(text, "tree");
        t.family = family;
        auto depth = [&] {
            if (kv.count("L"))
                t.L = parse_int<std::uint32_t>(kv["L"], "tree L");
        };
        if (family == "path") {
            only_keys(kv, {"L"}, "tree");
        } else if (family == "regular") {
            only_keys(kv, {"d", "L"}, "tree");
            if (!kv.count("d"))
                fail(ErrorKind::Parse, "tree spec 'regular' needs d=");
            t.d = parse_int<std::uint32_t>(kv["d"], "tree d");
        } else if (family == "poly") {
            only_keys(kv, {"b", "L"}, "tree");
            if (!kv.count("b"))
                fail(ErrorKind::Parse, "tree spec 'poly' needs b=");
            t.b = parse_double(kv["b"], "tree b");
        } else if (family == "gw") {
            only_keys(kv, {"pmf", "L", "seed"}, "tree");
            if (!kv.count("pmf"))
                fail(ErrorKind::Parse, "tree spec 'gw' needs pmf=p0/p1/...");
            for (const auto& p : split(kv["pmf"], '/'))
                t.pmf.push_back(parse_double(p, "tree pmf"));
            if (kv.count("seed"))
                t.seed = parse_int<std::uint64_t>(kv["seed"], "tree seed");
        } else if (family == "file") {
            t.path = text.substr(5);
            if (t.path.empty())
                fail(ErrorKind::Parse, "tree spec 'file:' needs a path");
            return t;
        } else {
            fail(ErrorKind::Parse, "unknown tree family '" + family + "' (path, regular, poly, gw, file)");
        }
        depth();
        return t;
    }

    std::uint32_t depth_or(std::optional<std::uint32_t> fallback) const {
        if (L)
            return *L;
        if (fallback)
            return *fallback;
        fail(ErrorKind::Parse, "tree spec '" + text + "' needs a depth (L= or --depth)");
    }

    Tree build(std::optional<std::uint32_t> L_override = std::nullopt) const {
        if (family == "file") {
            std::ifstream in(path);
            if (!in)
                fail(ErrorKind::InvalidArgument, "cannot open tree file '" + path + "'");
            return read_tree(in);
        }
        const std::uint32_t depth = L_override ? *L_override : depth_or(std::nullopt);
        if (family == "path")
            return build_path(depth);
        if (family == "regular")
            return build_regular(d, depth);
        if (family == "poly")
            return build_polynomial(b, depth);
        return build_galton_watson(pmf, depth, seed);
    }
};

struct EnvSpec {
    std::string text;
    std::string kind;  // const, alpha, file
    double lambda = 1.0, mu = 1.0;
    std::optional<AlphaDistribution> dist;
    std::string path;

    static EnvSpec parse(const std::string& text) {
        EnvSpec e;
        e.text = text;
        const auto colon = text.find(':');
        e.kind = text.substr(0, colon);
        const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
        if (e.kind == "unit") {
            e.kind = "const";
        } else if (e.kind == "const") {
            auto [_, kv] = parse_spec(text, "env");
            only_keys(kv, {"lambda", "mu"}, "env");
            if (kv.count("lambda"))
                e.lambda = parse_double(kv["lambda"], "env lambda");
            if (kv.count("mu"))
                e.mu = parse_double(kv["mu"], "env mu");
            if (!(e.lambda > 0) || !(e.mu > 0))
                fail(ErrorKind::Parse, "env lambda and mu must be positive");
        } else if (e.kind == "alpha") {
            try {
                e.dist = AlphaDistribution::parse(rest);
            } catch (const Error& err) {
                fail(ErrorKind::Parse, std::string("env spec '") + text + "': " + err.what());
            }
        } else if (e.kind == "file") {
            e.path = rest;
            if (e.path.empty())
                fail(ErrorKind::Parse, "env spec 'file:' needs a path");
        } else {
            fail(ErrorKind::Parse, "unknown env kind '" + e.kind + "' (unit, const, alpha, file)");
        }
        return e;
    }

    Environment build(const Tree& tree, std::uint64_t env_seed) const {
        if (kind == "const")
            return assign_deterministic(tree, [&](VertexId) { return lambda; }, [&](VertexId) { return mu; });
        if (kind == "alpha")
            return sample_random_environment(tree, *dist, env_seed);
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::InvalidArgument, "cannot open environment file '" + path + "'");
        return read_environment(in, tree);
    }
};

// Environment draws use their own stream, separate from per-trial seeds.
std::uint64_t env_seed_of(std::uint64_t master) { return hash_combine(master, 0xe7e7'e7e7ULL); }

std::string fraction_of(double x) {
    // Continued-fraction convergents up to denominator 10^4.
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int i = 0; i < 40; ++i) {
        const double a = std::floor(r);
        const long long h2 = static_cast<long long>(a) * h1 + h0, k2 = static_cast<long long>(a) * k1 + k0;
        if (k2 > 10000)
            break;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-12 * std::max(1.0, std::abs(x)))
            return std::to_string(h1) + "/" + std::to_string(k1);
        if (r - a < 1e-15)
            break;
        r = 1.0 / (r - a);
    }
    return "-";
}

// ---------------------------------------------------------------- output

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string csv() const {
        std::string s;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i)
                s += (i ? "," : "") + r[i];
            s += '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return s;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& r : rows) {
            json o;
            for (std::size_t i = 0; i < header.size(); ++i)
                o[header[i]] = r[i];
            arr.push_back(std::move(o));
        }
        return arr;
    }
};

std::string num(double x) { return format_double(x); }
template <typename I>
std::string num(I x) requires std::is_integral_v<I> { return std::to_string(x); }

struct Result {
    std::string name;
    json config;
    std::uint64_t seed = 0;
    json verdict;  // null unless the experiment issues one
    json statistics = json::object();
    Table table;
    std::map<std::string, std::string> extra_files;  // file name -> contents (only with --out-dir)
    std::optional<std::string> stdout_override;      // raw text for stdout (e.g. a tree file)

    json summary() const {
        json j;
        j["config"] = config;
        j["seed"] = seed;
        j["verdict"] = verdict;
        j["statistics"] = statistics;
        return j;
    }
};

struct Common {
    std::string tree;
    std::string env = "unit";
    std::uint64_t seed = 1;
    std::uint64_t trials = 0;
    std::string depth;
    std::string gamma_grid;
    double epsilon = 0.0;
    std::string out_dir;
    std::string format = "csv";
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out)
        fail(ErrorKind::InvalidArgument, "cannot write '" + p.string() + "'");
}

// Nothing is written until the experiment has fully succeeded.
void emit(const Result& r, const Common& c) {
    if (!c.out_dir.empty()) {
        const fs::path dir(c.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            fail(ErrorKind::InvalidArgument, "cannot create output directory '" + c.out_dir + "'");
        if (!r.table.header.empty())
            write_file(dir / (r.name + ".csv"), r.table.csv());
        write_file(dir / (r.name + ".json"), r.summary().dump(2) + "\n");
        for (const auto& [name, text] : r.extra_files)
            write_file(dir / name, text);
        return;
    }
    if (r.stdout_override) {
        std::cout << *r.stdout_override;
    } else if (c.format == "json") {
        json j = r.summary();
        j["table"] = r.table.to_json();
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << r.table.csv();
    }
}

json common_config(const Common& c) {
    json j;
    if (!c.tree.empty())
        j["tree"] = c.tree;
    j["env"] = c.env;
    return j;
}

std::vector<std::uint32_t> depths_or(const std::string& s, std::vector<std::uint32_t> fallback) {
    return s.empty() ? fallback : parse_list<std::uint32_t>(s, "--depth");
}

// ---------------------------------------------------------------- subcommands

struct GenTreeOpts {
    std::string family;
    double b = 1.0;
    std::uint32_t d = 3;
    std::uint32_t L = 0;
    std::string pmf;
    std::string output;
};

Result run_gen_tree(const Common& c, const GenTreeOpts& o) {
    std::string spec = c.tree;
    if (spec.empty()) {
        if (o.family.empty() || o.L == 0)
            fail(ErrorKind::Parse, "gen-tree needs --tree or --family with --L");
        if (o.family == "path")
            spec = "path:L=" + num(o.L);
        else if (o.family == "regular")
            spec = "regular:d=" + num(o.d) + ",L=" + num(o.L);
        else if (o.family == "poly")
            spec = "poly:b=" + num(o.b) + ",L=" + num(o.L);
        else if (o.family == "gw")
            spec = "gw:pmf=" + o.pmf + ",L=" + num(o.L) + ",seed=" + num(c.seed);
        else
            fail(ErrorKind::Parse, "unknown --family '" + o.family + "'");
    }
    const TreeSpec ts = TreeSpec::parse(spec);
    const Tree tree = ts.build();
    std::ostringstream text;
    write_tree(text, tree);

    Result r;
    r.name = "tree";
    r.config = {{"tree", spec}};
    r.seed = c.seed;
    r.statistics = {{"vertices", tree.size()}, {"depth", tree.truncation_depth()}};
    r.table.header = {"depth", "level_size"};
    const auto sizes = tree.level_sizes();
    for (std::size_t n = 0; n < sizes.size(); ++n)
        r.table.add({num(n), num(sizes[n])});
    r.extra_files["tree.txt"] = text.str();
    r.stdout_override = text.str();
    if (!o.output.empty()) {
        write_file(o.output, text.str());
        r.stdout_override = "";
    }
    return r;
}

struct PsiOpts {
    std::optional<std::uint32_t> edge_depth;
    std::optional<VertexId> edge;
    bool all = false;
};

Result run_psi(const Common& c, const PsiOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (!o.all && !o.edge_depth && !o.edge)
        fail(ErrorKind::Parse, "compute-psi needs --edge-depth, --edge or --all");
    const Tree tree = ts.build(c.depth.empty() ? std::nullopt
                                               : std::optional(parse_int<std::uint32_t>(c.depth, "--depth")));
    const Environment env = es.build(tree, env_seed_of(c.seed));
    const RuinProfile prof(tree, env);

    std::vector<VertexId> edges;
    if (o.all) {
        for (VertexId v = 1; v < tree.size(); ++v)
            edges.push_back(v);
    } else if (o.edge) {
        if (*o.edge == 0 || *o.edge >= tree.size())
            fail(ErrorKind::InvalidArgument, "--edge " + num(*o.edge) + " does not name an edge");
        edges.push_back(*o.edge);
    } else {
        if (*o.edge_depth < 1 || *o.edge_depth > tree.truncation_depth())
            fail(ErrorKind::InvalidArgument, "--edge-depth must lie in 1.." + num(tree.truncation_depth()));
        edges.push_back(tree.level(*o.edge_depth).front());
    }

    Result r;
    r.name = "psi";
    r.config = common_config(c);
    r.seed = c.seed;
    r.table.header = {"parent", "child", "depth", "psi", "Psi", "conductance"};
    for (VertexId v : edges)
        r.table.add({num(tree.parent(v)), num(v), num(tree.depth(v)), num(prof.psi(v)), num(prof.Psi(v)),
                     num(prof.adapted_conductance(v))});
    if (edges.size() == 1) {
        const VertexId v = edges.front();
        r.statistics = {{"edge", v}, {"depth", tree.depth(v)}, {"psi", prof.psi(v)}, {"Psi", prof.Psi(v)},
                        {"conductance", prof.adapted_conductance(v)}};
    }
    r.statistics["edges"] = edges.size();
    return r;
}

struct SimulateOpts {
    std::optional<std::uint64_t> max_steps;
    std::optional<std::uint32_t> hit_depth;
    std::optional<std::uint32_t> returns;
    std::string method = "direct";
    bool trajectory = false;
};

Result run_simulate(const Common& c, const SimulateOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (o.method != "direct" && o.method != "rubin")
        fail(ErrorKind::Parse, "--method must be direct or rubin");
    const std::uint64_t trials = c.trials ? c.trials : 1;
    const Tree tree = ts.build();
    const Environment env = es.build(tree, env_seed_of(c.seed));
    StopRule stop;
    stop.max_steps = o.max_steps;
    stop.hit_depth = o.hit_depth;
    stop.returns_to_root = o.returns;
    if (!stop.max_steps && !stop.hit_depth && !stop.returns_to_root)
        stop.max_steps = 1'000'000;

    Result r;
    r.name = "simulate";
    r.config = common_config(c);
    r.config["method"] = o.method;
    r.config["trials"] = trials;
    if (o.max_steps)
        r.config["max_steps"] = *o.max_steps;
    if (o.hit_depth)
        r.config["hit_depth"] = *o.hit_depth;
    if (o.returns)
        r.config["returns"] = *o.returns;
    r.seed = c.seed;
    r.table.header = split(kTrajectorySummaryHeader, ',');
    r.table.header.push_back("stop_reason");
    std::uint64_t escaped = 0, capped = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const std::uint64_t s = derive_seed(c.seed, i);
        stop.record_positions = o.trajectory && i == 0;
        const auto t = o.method == "rubin" ? simulate_rubin(tree, env, ClockTable(s), stop) : simulate(tree, env, stop, s);
        std::ostringstream row;
        write_trajectory_summary(row, s, t);
        auto cols = split(row.str().substr(0, row.str().size() - 1), ',');
        cols.push_back(to_string(t.reason));
        r.table.add(cols);
        escaped += t.escaped;
        capped += t.truncated;
        if (stop.record_positions) {
            std::ostringstream dump;
            write_trajectory(dump, t);
            r.extra_files["trajectory.txt"] = dump.str();
        }
    }
    if (capped)
        fail(ErrorKind::StepCap, num(capped) + " trajectories hit the hard step cap");
    r.statistics = {{"trials", trials}, {"escaped", escaped}};
    return r;
}

struct PercolateOpts {
    bool dump = false;
};

Result run_percolate(const Common& c, const PercolateOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    const std::uint64_t samples = c.trials ? c.trials : 1000;
    const Tree tree = ts.build();
    const Environment env = es.build(tree, env_seed_of(c.seed));
    const RuinProfile prof(tree, env);

    std::vector<PercolationSample> all(samples);
    std::uint64_t invalid = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        all[i] = sample_ruin_percolation(tree, env, derive_seed(c.seed, i));
        invalid += !all[i].valid;
    }
    Result r;
    r.name = "percolate";
    r.config = common_config(c);
    r.config["samples"] = samples;
    r.seed = c.seed;
    r.table.header = {"depth", "edge", "Psi", "estimate", "std_error", "samples", "excluded"};
    for (std::uint32_t n = 1; n <= tree.truncation_depth(); ++n) {
        const VertexId e = tree.level(n).front();
        BinomialEstimate est;
        for (const auto& s : all) {
            if (!s.valid) {
                ++est.excluded;
                continue;
            }
            ++est.trials;
            est.successes += s.in_cluster[e];
        }
        r.table.add({num(n), num(e), num(prof.Psi(e)), num(est.estimate()), num(est.std_error()), num(est.trials),
                     num(est.excluded)});
    }
    if (o.dump) {
        std::ostringstream dump;
        write_percolation_csv(dump, tree, all);
        r.extra_files["percolation_samples.csv"] = dump.str();
    }
    r.statistics = {{"samples", samples}, {"invalid", invalid}};
    return r;
}

struct EstimateOpts {
    double threshold = 0.1;
};

const std::vector<std::uint32_t> kDefaultDepths{8, 16, 32, 64, 128};

Result run_estimate_br(const Common& c, const EstimateOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    if (ts.family == "file")
        fail(ErrorKind::Parse, "estimate-br needs a generated tree family, not a file");
    const auto depths = depths_or(c.depth, kDefaultDepths);
    const auto grid = parse_grid(c.gamma_grid.empty() ? "0.25:3:0.25" : c.gamma_grid);
    const TrendEstimate est =
        ts.family == "poly"
            ? branching_ruin_estimate_levels([&](std::uint32_t L) { return polynomial_level_sizes(ts.b, L); }, grid,
                                             o.threshold, depths)
            : branching_ruin_estimate([&](std::uint32_t L) { return ts.build(L); }, grid, o.threshold, depths);
    Result r;
    r.name = "estimate_br";
    r.config = {{"tree", c.tree}, {"depths", depths}, {"gamma_grid", grid}, {"threshold", o.threshold}};
    r.seed = c.seed;
    r.table.header = {"gamma", "depth", "min_cutset_sum"};
    for (const auto& row : est.table)
        r.table.add({num(row.gamma), num(row.depth), num(row.value)});
    r.statistics = {{"br_r_estimate", est.estimate}};
    return r;
}

Result run_estimate_rt(const Common& c, const EstimateOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (ts.family == "file")
        fail(ErrorKind::Parse, "estimate-rt needs a generated tree family, not a file");
    const auto depths = depths_or(c.depth, {8, 16, 32});
    const auto grid = parse_grid(c.gamma_grid.empty() ? "0.25:3:0.25" : c.gamma_grid);
    const std::uint64_t env_seed = env_seed_of(c.seed);
    const TrendEstimate est = rt_estimate(
        [&](std::uint32_t L) {
            Tree t = ts.build(L);
            Environment env = es.build(t, env_seed);
            return TreeWithEnvironment{std::move(t), std::move(env)};
        },
        grid, o.threshold, depths);
    Result r;
    r.name = "estimate_rt";
    r.config = common_config(c);
    r.config["depths"] = depths;
    r.config["gamma_grid"] = grid;
    r.config["threshold"] = o.threshold;
    r.seed = c.seed;
    r.table.header = {"gamma", "depth", "min_cutset_sum"};
    for (const auto& row : est.table)
        r.table.add({num(row.gamma), num(row.depth), num(row.value)});
    r.statistics = {{"rt_estimate", est.estimate}};
    return r;
}

struct FlowOpts {
    double gamma = 1.5;
};

Result run_flow_check(const Common& c, const FlowOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (ts.family == "file")
        fail(ErrorKind::Parse, "flow-check needs a generated tree family, not a file");
    const auto depths = depths_or(c.depth, {8, 16, 32});
    const std::uint64_t env_seed = env_seed_of(c.seed);
    const auto rows = flow_energy_check(
        [&](std::uint32_t L) {
            Tree t = ts.build(L);
            Environment env = es.build(t, env_seed);
            return TreeWithEnvironment{std::move(t), std::move(env)};
        },
        o.gamma, depths);
    Result r;
    r.name = "flow_check";
    r.config = common_config(c);
    r.config["gamma"] = o.gamma;
    r.config["depths"] = depths;
    r.seed = c.seed;
    r.table.header = {"depth", "max_flow", "flow_value", "energy", "degenerate"};
    bool any_degenerate = false;
    for (const auto& row : rows) {
        r.table.add({num(row.depth), num(row.max_flow), num(row.value), num(row.energy), row.degenerate ? "1" : "0"});
        any_degenerate = any_degenerate || row.degenerate;
    }
    r.statistics = {{"degenerate", any_degenerate}};
    return r;
}

struct PhaseOpts {
    std::optional<std::uint32_t> escape_depth;
    std::uint64_t horizon = 1'000'000;
    double margin = 0.1;
    double control_b = 0.25;
    std::optional<double> br_r;
};

Result run_phase_scan(const Common& c, const PhaseOpts& o) {
    const TreeSpec ts = TreeSpec::parse(c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (es.kind != "alpha")
        fail(ErrorKind::Parse, "phase-scan needs an alpha:... environment");
    if (ts.family != "poly" && !o.br_r)
        fail(ErrorKind::Parse, "phase-scan needs a poly tree or an explicit --br-r");
    const std::uint32_t L = ts.depth_or(c.depth.empty() ? std::nullopt
                                                        : std::optional(parse_int<std::uint32_t>(c.depth, "--depth")));
    const std::uint32_t D = o.escape_depth ? *o.escape_depth : (3 * L) / 4;
    const std::uint64_t trials = c.trials ? c.trials : 2000;

    PhaseFamily fam{ts.text, ts.build(L), o.br_r ? *o.br_r : ts.b};
    PhaseFamily ctl = polynomial_phase_family(o.control_b, L);
    const PhaseVerdict v = phase_diagnostic(fam, ctl, *es.dist, o.margin, D, o.horizon, trials, c.seed);

    Result r;
    r.name = "phase_scan";
    r.config = common_config(c);
    r.config["depth"] = L;
    r.config["escape_depth"] = D;
    r.config["horizon"] = o.horizon;
    r.config["trials"] = trials;
    r.config["margin"] = o.margin;
    r.config["control"] = ctl.id;
    r.seed = c.seed;
    r.verdict = to_string(v.verdict);
    r.statistics = {{"m", v.m},
                    {"br_r", v.br_r},
                    {"threshold", v.threshold},
                    {"escape_frequency", v.escape.estimate()},
                    {"escape_std_error", v.escape.std_error()},
                    {"control_escape_frequency", v.control_escape.estimate()},
                    {"control_std_error", v.control_escape.std_error()},
                    {"sigma", v.sigma},
                    {"mean_returns", v.mean_returns},
                    {"frac_returns_target", v.frac_return_target},
                    {"frac_horizon", v.frac_horizon}};
    r.table.header = {"family", "env", "m", "br_r", "threshold", "escape_frequency", "control_frequency", "sigma",
                      "verdict"};
    r.table.add({v.family, es.text, num(v.m), num(v.br_r), num(v.threshold), num(v.escape.estimate()),
                 num(v.control_escape.estimate()), num(v.sigma), to_string(v.verdict)});
    return r;
}

struct GamblerOpts {
    std::string mu;
    std::uint32_t start = 1;
};

Result run_gambler(const Common& c, const GamblerOpts& o) {
    if (o.mu.empty())
        fail(ErrorKind::Parse, "gambler needs --mu");
    // One bias per state 1..N; the entry for the absorbing state N is unused.
    auto mu = parse_list<double>(o.mu, "--mu");
    if (mu.size() < 2)
        fail(ErrorKind::Parse, "--mu needs at least two entries (N >= 2)");
    mu.pop_back();
    const GamblerChain chain(mu, o.start);
    const double x = gambler_ruin_exact(chain);

    Result r;
    r.name = "gambler";
    r.config = {{"mu", o.mu}, {"start", o.start}, {"N", chain.N()}};
    r.seed = c.seed;
    r.table.header = {"start", "N", "ruin_probability", "fraction"};
    r.table.add({num(o.start), num(chain.N()), num(x), fraction_of(x)});
    r.statistics = {{"ruin_probability", x}, {"fraction", fraction_of(x)}};
    if (c.trials) {
        const auto est = gambler_ruin_mc(chain, c.trials, c.seed);
        r.table.header.insert(r.table.header.end(), {"mc_estimate", "mc_std_error", "trials"});
        r.table.rows[0].insert(r.table.rows[0].end(),
                               {num(est.estimate()), num(est.std_error()), num(est.trials)});
        r.statistics["mc_estimate"] = est.estimate();
        r.statistics["mc_std_error"] = est.std_error();
        r.statistics["trials"] = est.trials;
    }
    return r;
}

Result run_concentration(const Common& c) {
    const TreeSpec ts = TreeSpec::parse(c.tree.empty() ? "path:L=128" : c.tree);
    const EnvSpec es = EnvSpec::parse(c.env);
    if (es.kind != "alpha")
        fail(ErrorKind::Parse, "concentration needs an alpha:... environment");
    const double eps = c.epsilon > 0 ? c.epsilon : 0.3;
    const auto depths = depths_or(c.depth, kDefaultDepths);
    const std::uint32_t L = *std::max_element(depths.begin(), depths.end());
    const std::uint64_t samples = c.trials ? c.trials : 1000;
    const Tree tree = ts.build(ts.L ? *ts.L : L);
    const auto rows = concentration_experiment(tree, *es.dist, eps, depths, samples, c.seed);

    Result r;
    r.name = "concentration";
    r.config = {{"tree", ts.text}, {"env", es.text}, {"epsilon", eps}, {"depths", depths}, {"samples", samples}};
    r.seed = c.seed;
    r.table.header = {"depth", "edge", "failures", "samples", "frequency", "std_error"};
    for (const auto& row : rows)
        r.table.add({num(row.depth), num(row.edge), num(row.failures), num(row.samples), num(row.frequency()),
                     num(row.std_error())});
    r.statistics = {{"m", es.dist->m()}, {"nonincreasing_within_2sigma", nonincreasing_within_noise(rows, 2.0)}};
    return r;
}

// ---------------------------------------------------------------- main

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void add_common(CLI::App* sub, Common& c, bool tree = true, bool env = true) {
    if (tree)
        sub->add_option("--tree", c.tree, "Tree spec: path:L=.., regular:d=..,L=.., poly:b=..,L=.., gw:pmf=p0/p1/..,L=.., file:<path>");
    if (env)
        sub->add_option("--env", c.env, "Environment: unit, const:lambda=..,mu=.., alpha:point=a, alpha:two=a1,a2,p1, alpha:discrete=a:p,.., file:<path>");
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--out-dir", c.out_dir, "Write <name>.csv and <name>.json here instead of stdout");
    sub->add_option("--format", c.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"goerw: once-excited random walks on trees"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file; flags override file values");
    app.allow_config_extras(false);

    Common common;

    GenTreeOpts gt;
    auto* gen = app.add_subcommand("gen-tree", "Generate a tree and write it in the tree file format");
    add_common(gen, common, true, false);
    gen->add_option("--family", gt.family, "path, regular, poly or gw")->check(CLI::IsMember({"path", "regular", "poly", "gw"}));
    gen->add_option("--b", gt.b, "Polynomial growth exponent");
    gen->add_option("--d", gt.d, "Root degree of the regular tree");
    gen->add_option("--L", gt.L, "Truncation depth");
    gen->add_option("--pmf", gt.pmf, "Galton-Watson offspring law p0/p1/...");
    gen->add_option("--output,-o", gt.output, "Tree file to write");

    PsiOpts po;
    auto* psi_cmd = app.add_subcommand("compute-psi", "Print psi, Psi and the adapted conductance of edges");
    psi_cmd->alias("psi");
    add_common(psi_cmd, common);
    psi_cmd->add_option("--depth", common.depth, "Override the tree depth");
    psi_cmd->add_option("--edge-depth", po.edge_depth, "Use the leftmost edge at this depth");
    psi_cmd->add_option("--edge", po.edge, "Edge by child vertex id");
    psi_cmd->add_flag("--all", po.all, "Every edge of the tree");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Simulate walks and report per-trial summaries");
    add_common(sim, common);
    sim->add_option("--trials", common.trials, "Number of walks (default 1)");
    sim->add_option("--max-steps", so.max_steps, "Stop after this many steps");
    sim->add_option("--hit-depth", so.hit_depth, "Stop on reaching this depth");
    sim->add_option("--returns", so.returns, "Stop at this many returns to the root");
    sim->add_option("--method", so.method, "direct or rubin")->check(CLI::IsMember({"direct", "rubin"}));
    sim->add_flag("--trajectory", so.trajectory, "Dump the first trajectory to trajectory.txt (with --out-dir)");

    PercolateOpts pc;
    auto* perc = app.add_subcommand("percolate", "Sample the ruin percolation and compare with Psi");
    add_common(perc, common);
    perc->add_option("--trials", common.trials, "Number of samples (default 1000)");
    perc->add_flag("--dump", pc.dump, "Write every sample to percolation_samples.csv (with --out-dir)");

    EstimateOpts eo;
    auto* br = app.add_subcommand("estimate-br", "Trend estimate of the branching-ruin number");
    add_common(br, common, true, false);
    br->add_option("--depth", common.depth, "Comma-separated depths (default 8,16,32,64,128)");
    br->add_option("--gamma-grid", common.gamma_grid, "List or lo:hi:step (default 0.25:3:0.25)");
    br->add_option("--threshold", eo.threshold, "Boundedness threshold");

    auto* rt = app.add_subcommand("estimate-rt", "Trend estimate of RT with weights Psi^gamma");
    add_common(rt, common);
    rt->add_option("--depth", common.depth, "Comma-separated depths (default 8,16,32)");
    rt->add_option("--gamma-grid", common.gamma_grid, "List or lo:hi:step (default 0.25:3:0.25)");
    rt->add_option("--threshold", eo.threshold, "Boundedness threshold");

    FlowOpts fo;
    auto* flow = app.add_subcommand("flow-check", "Max flow under Psi^gamma capacities and its energy");
    add_common(flow, common);
    flow->add_option("--depth", common.depth, "Comma-separated depths (default 8,16,32)");
    flow->add_option("--gamma", fo.gamma, "Capacity exponent");

    PhaseOpts ph;
    auto* phase = app.add_subcommand("phase-scan", "Directional recurrence/transience diagnostic");
    add_common(phase, common);
    phase->add_option("--depth", common.depth, "Tree depth when the spec has no L");
    phase->add_option("--trials", common.trials, "Annealed trials (default 2000)");
    phase->add_option("--escape-depth", ph.escape_depth, "Escape depth D (default 3L/4)");
    phase->add_option("--horizon", ph.horizon, "Step horizon per trial");
    phase->add_option("--margin", ph.margin, "Refuse when |br_r - (2 - m)| is below this");
    phase->add_option("--control-b", ph.control_b, "Exponent of the polynomial control tree");
    phase->add_option("--br-r", ph.br_r, "Branching-ruin number for non-polynomial trees");

    GamblerOpts go;
    auto* gam = app.add_subcommand("gambler", "Exact (and optionally Monte Carlo) gambler's ruin");
    gam->add_option("--mu", go.mu, "Comma-separated biases mu_1..mu_N; N is the list length")->required();
    gam->add_option("--start", go.start, "Starting state");
    gam->add_option("--trials", common.trials, "Monte Carlo trials (0 = exact only)");
    gam->add_option("--seed", common.seed, "Master seed");
    gam->add_option("--out-dir", common.out_dir, "Output directory");
    gam->add_option("--format", common.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));

    auto* conc = app.add_subcommand("concentration", "Frequency of the concentration event failing, per depth");
    add_common(conc, common);
    conc->add_option("--depth", common.depth, "Comma-separated depths (default 8,16,32,64,128)");
    conc->add_option("--epsilon", common.epsilon, "Band half-width exponent (default 0.3)");
    conc->add_option("--trials", common.trials, "Environment samples (default 1000)");

    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; }))
        sub->allow_config_extras(false);

    if (argc > 1 && argv[1][0] != '-' &&
        std::find(kSubcommands.begin(), kSubcommands.end(), argv[1]) == kSubcommands.end() &&
        std::string(argv[1]) != "psi") {
        std::string best;
        std::size_t best_d = 1000;
        std::vector<std::string> names = kSubcommands;
        names.push_back("psi");
        for (const auto& s : names)
            if (auto d = edit_distance(argv[1], s); d < best_d)
                best_d = d, best = s;
        std::cerr << "error: unknown subcommand '" << argv[1] << "'";
        if (best_d <= 3)
            std::cerr << "; did you mean '" << best << "'?";
        std::cerr << "\nRun with --help to list subcommands.\n";
        return kExitUsage;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        Result r;
        if (gen->parsed())
            r = run_gen_tree(common, gt);
        else if (psi_cmd->parsed())
            r = run_psi(common, po);
        else if (sim->parsed())
            r = run_simulate(common, so);
        else if (perc->parsed())
            r = run_percolate(common, pc);
        else if (br->parsed())
            r = run_estimate_br(common, eo);
        else if (rt->parsed())
            r = run_estimate_rt(common, eo);
        else if (flow->parsed())
            r = run_flow_check(common, fo);
        else if (phase->parsed())
            r = run_phase_scan(common, ph);
        else if (gam->parsed())
            r = run_gambler(common, go);
        else if (conc->parsed())
            r = run_concentration(common);
        emit(r, common);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.is_usage_error() ? kExitUsage : kExitRefusal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRefusal;
    }
    return 0;
}
