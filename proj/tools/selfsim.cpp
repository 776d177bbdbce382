#include "selfsim/pipeline.hpp"
#include "selfsim/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace selfsim;

namespace {

enum Exit { ok = 0, usage = 1, inadmissible = 2, precision = 3, coverage = 4, replay_mismatch = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Output {
    std::string name;
    std::string content;
};

struct Run {
    std::string command;
    std::string config;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::vector<std::string> args;   // everything except --out
    json parameters = json::object();
    std::vector<Output> outputs;

    void add(std::string name, std::string content) { outputs.push_back({std::move(name), std::move(content)}); }
};

std::string csv_series(const std::vector<double>& scale, const std::vector<double>& partial, double target) {
    std::ostringstream os;
    os << "scale,partial,target,relative_error\n";
    for (std::size_t i = 0; i < scale.size(); ++i) {
        double rel = target != 0 ? (partial[i] - target) / target : NAN;
        os << num(scale[i]) << ',' << num(partial[i]) << ',' << num(target) << ',' << num(rel) << '\n';
    }
    return os.str();
}

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::zero: return "zero";
        case BlockKind::primitive: return "primitive";
        case BlockKind::imprimitive: return "imprimitive";
    }
    return "zero";
}

json blocks_json(const BlockStructure& bs, const std::vector<std::string>& labels) {
    json out = json::array();
    for (std::size_t k = 0; k < bs.blocks.size(); ++k) {
        json letters = json::array();
        for (auto i : bs.blocks[k]) letters.push_back(labels[i]);
        out.push_back({{"letters", letters}, {"kind", kind_name(bs.kind[k])}, {"radius", bs.radius[k]}});
    }
    return out;
}

json matrix_json(const CountMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.n; ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.n; ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

json header(const Run& run, const char* kind) {
    return {{"schema_version", kSchemaVersion}, {"kind", kind}, {"config", run.config}};
}

Analysis analyze_config(const Run& run) {
    std::string text = read_file(run.config);
    if (is_matrix_fixture(text)) throw UsageError("matrix-only fixtures support the analyze command only");
    return analyze(parse_substitution(text));
}

Observable parse_observable(const std::string& spec, const Substitution& sub) {
    Observable f;
    f.weights.assign(sub.size(), 0.0);
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos) throw UsageError("--f expects letter:weight pairs, got '" + item + "'");
        std::string label = item.substr(0, colon);
        double w;
        try {
            w = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("bad weight in '" + item + "'");
        }
        Letter a;
        try {
            a = sub.letter(label);
        } catch (const std::exception&) {
            throw UsageError("unknown letter '" + label + "' in --f");
        }
        f.weights[a] = w;
    }
    return f;
}

double read_c(double c, const std::string& c_from) {
    if (!c_from.empty()) {
        auto doc = json::parse(read_file(c_from), nullptr, false);
        if (doc.is_discarded() || !doc.contains("c_hat")) throw UsageError(c_from + " has no c_hat field");
        return doc["c_hat"].get<double>();
    }
    if (!(c > 0)) throw UsageError("a positive --c or --c-from is required");
    return c;
}

// ---------------------------------------------------------------- analyze

void cmd_analyze(Run& run, int& exit_code) {
    std::string text = read_file(run.config);
    json out = header(run, "analysis");
    if (is_matrix_fixture(text)) {
        auto fx = parse_matrix_fixture(text);
        auto rep = matrix_report(fx);
        out["input"] = "matrix";
        out["labels"] = fx.labels;
        out["matrix"] = matrix_json(fx.matrix);
        out["blocks"] = blocks_json(rep.blocks, fx.labels);
        out["lambda"] = rep.lambda;
        out["dim"] = fx.dim;
        out["rho_A"] = rep.shape.rho_A;
        out["rho_B"] = rep.shape.rho_B;
        out["alpha"] = rep.alpha ? json(*rep.alpha) : json(nullptr);
        out["lambda_dim_mismatch"] = rep.lambda_dim_mismatch;
        out["failures"] = rep.shape.failures;
        out["admissible"] = rep.alpha.has_value();
        if (!rep.alpha) {
            for (const auto& f : rep.shape.failures) std::cerr << "inadmissible: " << f << '\n';
            exit_code = inadmissible;
        }
        run.add("analyze.json", out.dump(2) + "\n");
        return;
    }
    auto sub = parse_substitution(text);
    auto m = substitution_matrix(sub);
    auto bs = normal_form(m);
    auto rep = admissibility_report(sub);
    out["input"] = "substitution";
    out["alphabet"] = sub.alphabet;
    out["dim"] = sub.dim;
    out["matrix"] = matrix_json(m);
    out["blocks"] = blocks_json(bs, sub.alphabet);
    out["rho_A"] = rep.shape.rho_A;
    out["rho_B"] = rep.shape.rho_B;
    out["alpha"] = rep.alpha ? json(*rep.alpha) : json(nullptr);
    out["admissibility"] = {{"shape", rep.shape.shape_ok},
                            {"rho_order", rep.shape.rho_order_ok},
                            {"border", rep.border_ok},
                            {"interior", rep.interior_ok},
                            {"witness_k", rep.witness_k},
                            {"failures", rep.failures}};
    out["admissible"] = rep.admissible();
    if (!rep.admissible()) {
        for (const auto& f : rep.failures) std::cerr << "inadmissible: " << f << '\n';
        exit_code = inadmissible;
        run.add("analyze.json", out.dump(2) + "\n");
        return;
    }
    auto a = analyze(sub);
    json b = json::array();
    for (auto i : a.b_letters) b.push_back(sub.alphabet[i]);
    out["lambda"] = a.lambda;
    out["b_letters"] = b;
    out["xi_len"] = vec_json(a.xi_len.xi);
    out["xi_tr"] = vec_json(a.norm.nu);
    out["h"] = vec_json(a.norm.h);
    out["graph"] = {{"vertices", a.graph.vertex_count()},
                    {"edges", a.graph.edges.size()},
                    {"lattice", a.graph.lattice},
                    {"overlap", a.graph.overlap}};
    run.add("analyze.json", out.dump(2) + "\n");
}

// ---------------------------------------------------------------- density

struct DensityArgs {
    std::string method = "pointwise";
    int k = -1;
    int replicas = 64;
    double step = 1.0 / 32;
    std::string side;
    bool direct = false;
};

json estimate_json(const DensityEstimate& e) {
    return {{"method", to_string(e.method)},   {"side", to_string(e.side)},
            {"transport", e.transport},        {"k", e.k},
            {"step", e.step},                  {"replicas", e.replicas},
            {"seed", e.seed},                  {"alpha", e.alpha},
            {"c_hat", e.c_hat},                {"stderr", e.stderr_},
            {"systematic_bound", e.systematic_bound}, {"per_replica", vec_json(e.per_replica)}};
}

void cmd_density(Run& run, const DensityArgs& da) {
    auto a = analyze_config(run);
    auto opt = default_density_options(a.graph);
    if (da.k > 0) opt.k = da.k;
    opt.replicas = da.replicas;
    opt.step = da.step;
    opt.seed = run.seed;
    opt.threads = run.threads;
    std::string side = da.side.empty() ? (a.graph.dim == 1 ? "right" : "symmetric") : da.side;
    if (side == "right") opt.side = BallShape::right;
    else if (side == "left") opt.side = BallShape::left;
    else if (side == "symmetric") opt.side = BallShape::symmetric;
    else throw UsageError("--side must be symmetric, right or left");
    opt.transport = !da.direct;

    std::vector<DensityMethod> methods;
    if (da.method == "pointwise" || da.method == "both") methods.push_back(DensityMethod::pointwise);
    if (da.method == "birkhoff" || da.method == "both") methods.push_back(DensityMethod::birkhoff);
    if (methods.empty()) throw UsageError("--method must be pointwise, birkhoff or both");

    json out = header(run, "density");
    out["alpha"] = a.alpha;
    json ests = json::array();
    std::vector<double> cs;
    for (auto m : methods) {
        opt.method = m;
        auto e = average_density(a.graph, a.mass, a.alpha, opt);
        ests.push_back(estimate_json(e));
        cs.push_back(e.c_hat);
    }
    out["estimates"] = ests;
    double c = 0;
    for (double v : cs) c += v / static_cast<double>(cs.size());
    out["c_hat"] = c;
    if (cs.size() == 2) out["cross_check"] = {{"relative_delta", std::abs(cs[0] - cs[1]) / cs[1]}};
    run.add("density.json", out.dump(2) + "\n");
}

// ---------------------------------------------------------------- orbits

struct OrbitArgs {
    std::string orbit = "random";
    int orbits = 256;
};

Word fixed_orbit(const Analysis& a, std::uint64_t n) {
    for (auto [l, r] : fixed_point_seeds(a.sub)) {
        if (!a.is_b[r]) continue;
        auto L = level_lengths(a.sub, 64);
        int m = 0;
        while (L[m][r] < n + 2) ++m;
        return iterate(a.sub, r, m, std::max<std::uint64_t>(kDefaultLengthCap, n + 2));
    }
    throw UsageError("no fixed point with a B-letter at the origin");
}

template <class Fn>
void for_each_orbit(const Analysis& a, const Run& run, const OrbitArgs& oa, std::uint64_t n, Fn&& fn) {
    if (oa.orbit == "fixed") {
        fn(fixed_orbit(a, n), 0);
        return;
    }
    if (oa.orbit != "random") throw UsageError("--orbit must be random or fixed");
    if (oa.orbits < 1) throw UsageError("--orbits must be positive");
    auto os = make_orbit_sampler(a.sub, a.b_letters, a.norm.h, a.rho_A, n + 1);
    for (int i = 0; i < oa.orbits; ++i) {
        Stream rng(run.seed, StreamTag::orbit, static_cast<std::uint64_t>(i));
        fn(sample_orbit(os, rng), i);
    }
}

struct Ensemble {
    std::vector<double> grid, mean;
    std::vector<double> windows, finals;
    int count = 0;

    template <class S>
    void add(const S& s) {
        if (count == 0) {
            grid = s.grid;
            mean.assign(grid.size(), 0.0);
        }
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.partials[i];
        windows.push_back(s.window);
        finals.push_back(s.final_partial);
        ++count;
    }

    json summary(double target, double lo) {
        for (auto& v : mean) v /= count;
        auto stat = [&](const std::vector<double>& v) {
            double m = 0, ss = 0;
            for (double x : v) m += x / static_cast<double>(v.size());
            for (double x : v) ss += (x - m) * (x - m);
            double se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
            return std::pair{m, se};
        };
        auto [wm, wse] = stat(windows);
        auto [fm, fse] = stat(finals);
        double mn = INFINITY, mx = -INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid[i] >= lo * (1 - 1e-12)) {
                mn = std::min(mn, mean[i]);
                mx = std::max(mx, mean[i]);
            }
        double osc = mx >= mn ? mx - mn : 0.0;
        return {{"orbits", count},
                {"target", target},
                {"final_partial", mean.empty() ? 0.0 : mean.back()},
                {"final_partial_stderr", fse},
                {"final_decade_window", wm},
                {"final_decade_window_stderr", wse},
                {"final_decade_relative_error", target != 0 ? (wm - target) / target : NAN},
                {"final_decade_oscillation", osc},
                {"mean_per_orbit_final", fm}};
    }
};

void summary_line(const json& s) {
    std::cerr << "final-decade window " << num(s["final_decade_window"].get<double>()) << " target "
              << num(s["target"].get<double>()) << " relative error "
              << num(s["final_decade_relative_error"].get<double>()) << '\n';
}

// ---------------------------------------------------------------- second order

struct SeriesArgs {
    std::uint64_t n = 531441;
    double R = 0;
    double c = 0;
    std::string c_from;
    std::string f;
    std::string engine = "symbolic";
    std::string origin = "random";
    int origins = 64;
};

void cmd_second_order(Run& run, const SeriesArgs& sa, const OrbitArgs& oa) {
    auto a = analyze_config(run);
    double c = read_c(sa.c, sa.c_from);
    Observable f;
    if (!sa.f.empty()) {
        f = parse_observable(sa.f, a.sub);
    } else if (a.sub.dim == 2) {
        f.weights = a.h_weight_per_letter();
    } else {
        f = indicator(a.sub.size(), static_cast<Letter>(a.b_letters.front()));
    }
    validate_observable(f, a.is_b);
    double target = integral_nu(f, a.b_letters, a.norm.nu);
    json out = header(run, "second_order");
    out["alpha"] = a.alpha;
    out["c"] = c;
    out["weights"] = vec_json(f.weights);

    if (a.sub.dim == 2) {
        double R = sa.R > 0 ? sa.R : 2187;
        if (sa.origin == "corner") {
            int level = 0;
            double half = 1;
            while (half < R) {
                half *= a.sub.q;
                ++level;
            }
            auto patch = grid_patch(a.sub, default_seed(a.sub, static_cast<Letter>(a.b_letters.front())), level);
            auto s = second_order_patch(patch, a.is_b, f.weights, a.alpha, c, R, target);
            Ensemble e;
            e.add(s);
            out["engine"] = "tiling_2d_corner";
            out["R_max"] = R;
            out["summary"] = e.summary(target, R / 10);
            run.add("series.csv", csv_series(e.grid, e.mean, target));
        } else if (sa.origin == "random") {
            Tiling2DOptions opt;
            opt.R_max = R;
            opt.origins = sa.origins;
            opt.seed = run.seed;
            opt.threads = run.threads;
            auto res = second_order_tiling_2d(a.sub, a.b_letters, a.norm.h, f.weights, a.alpha, c, target, opt);
            json s = {{"origins", sa.origins},
                      {"target", target},
                      {"final_partial", res.series.final_partial},
                      {"final_partial_stderr", res.stderr_final},
                      {"final_decade_window", res.series.window},
                      {"final_decade_relative_error", target != 0 ? (res.series.window - target) / target : NAN},
                      {"final_decade_oscillation", res.series.oscillation},
                      {"rejected_origins", res.rejected}};
            out["engine"] = "tiling_2d";
            out["R_max"] = R;
            out["summary"] = s;
            run.add("series.csv", csv_series(res.series.grid, res.series.partials, target));
        } else {
            throw UsageError("--origin must be random or corner");
        }
        summary_line(out["summary"]);
        run.add("second_order.json", out.dump(2) + "\n");
        return;
    }

    Ensemble e;
    if (sa.engine == "symbolic") {
        auto kw = make_scale_weights(a.alpha + 1, sa.n);
        for_each_orbit(a, run, oa, sa.n, [&](const Word& x, int) {
            e.add(second_order_symbolic(x, f, a.alpha, c, sa.n, target, kw));
        });
        out["n"] = sa.n;
        out["summary"] = e.summary(target, static_cast<double>(sa.n) / 10);
    } else if (sa.engine == "tiling") {
        double R = sa.R > 0 ? sa.R : static_cast<double>(sa.n);
        double xmax = *std::max_element(a.xi_len.xi.begin(), a.xi_len.xi.end());
        auto need = static_cast<std::uint64_t>(std::ceil(R)) + static_cast<std::uint64_t>(xmax) + 2;
        for_each_orbit(a, run, oa, need, [&](const Word& x, int) {
            auto win = window_from_sequence(Word{}, x, a.xi_len);
            e.add(second_order_tiling_1d(win, a.xi_len, f, a.alpha, c, R, target));
        });
        out["R_max"] = R;
        out["summary"] = e.summary(target, R / 10);
    } else {
        throw UsageError("--engine must be symbolic or tiling");
    }
    out["engine"] = sa.engine;
    out["orbit"] = oa.orbit;
    summary_line(out["summary"]);
    run.add("series.csv", csv_series(e.grid, e.mean, target));
    run.add("second_order.json", out.dump(2) + "\n");
}

// ---------------------------------------------------------------- frequencies

Letter letter_arg(const Analysis& a, const std::string& label, bool default_b) {
    if (label.empty()) return static_cast<Letter>(default_b ? a.b_letters.front() : a.blocks.a_part.front());
    try {
        return a.sub.letter(label);
    } catch (const std::exception&) {
        throw UsageError("unknown letter '" + label + "'");
    }
}

void cmd_frequency(Run& run, const SeriesArgs& sa, const OrbitArgs& oa, const std::string& letter) {
    auto a = analyze_config(run);
    if (a.sub.dim != 1) throw UsageError("frequency needs a 1-D substitution");
    double c = read_c(sa.c, sa.c_from);
    Letter b = letter_arg(a, letter, true);
    if (!a.is_b[b]) throw UsageError("frequency needs a B-letter");
    double nu_b = integral_nu(indicator(a.sub.size(), b), a.b_letters, a.norm.nu);
    double target = a.alpha * c * nu_b;
    auto kw = make_scale_weights(a.alpha, sa.n);
    Ensemble e;
    for_each_orbit(a, run, oa, sa.n, [&](const Word& x, int) { e.add(alpha_frequency(x, b, a.alpha, sa.n, target, kw)); });
    json out = header(run, "frequency");
    out["letter"] = a.sub.alphabet[b];
    out["alpha"] = a.alpha;
    out["c"] = c;
    out["n"] = sa.n;
    out["orbit"] = oa.orbit;
    out["summary"] = e.summary(target, static_cast<double>(sa.n) / 10);
    summary_line(out["summary"]);
    run.add("series.csv", csv_series(e.grid, e.mean, target));
    run.add("frequency.json", out.dump(2) + "\n");
}

void cmd_logfreq(Run& run, const SeriesArgs& sa, const OrbitArgs& oa, const std::string& letter) {
    auto a = analyze_config(run);
    if (a.sub.dim != 1) throw UsageError("logfreq needs a 1-D substitution");
    Letter l = letter_arg(a, letter, false);
    // Letter frequencies: right PF vector of the A-block, B-letters have frequency zero.
    double target = 0;
    if (!a.is_b[l]) {
        auto pa = perron_vectors(principal_submatrix(a.matrix, a.blocks.a_part), Normalization::sum_one);
        for (std::size_t i = 0; i < a.blocks.a_part.size(); ++i)
            if (a.blocks.a_part[i] == l) target = pa.right_vec[i];
    }
    auto kw = make_scale_weights(1.0, sa.n);
    Ensemble e;
    for_each_orbit(a, run, oa, sa.n, [&](const Word& x, int) { e.add(alpha_frequency(x, l, 1.0, sa.n, target, kw)); });
    json out = header(run, "logfreq");
    out["letter"] = a.sub.alphabet[l];
    out["n"] = sa.n;
    out["orbit"] = oa.orbit;
    json s = e.summary(target, static_cast<double>(sa.n) / 10);
    out["summary"] = s;
    std::cerr << "final partial " << num(s["final_partial"].get<double>()) << " target " << num(target) << '\n';
    run.add("series.csv", csv_series(e.grid, e.mean, target));
    run.add("logfreq.json", out.dump(2) + "\n");
}

// ---------------------------------------------------------------- distribution

void cmd_distribution(Run& run, const SeriesArgs& sa, int levels, int samples) {
    auto a = analyze_config(run);
    if (a.sub.dim != 1) throw UsageError("distribution needs a 1-D substitution");
    Observable f = sa.f.empty() ? indicator(a.sub.size(), static_cast<Letter>(a.b_letters.front()))
                                : parse_observable(sa.f, a.sub);
    validate_observable(f, a.is_b);
    auto d = distribution_experiment(a.sub, a.b_letters, a.norm.h, a.rho_A, a.rho_B, f, levels,
                                     static_cast<std::size_t>(samples), run.seed, run.threads);
    std::ostringstream os;
    os << "level,prefix";
    for (int p = 1; p <= 9; ++p) os << ",q" << p * 10;
    os << ",ks_distance,mean\n";
    for (const auto& l : d) {
        os << l.level << ',' << l.prefix;
        for (double q : l.quantiles) os << ',' << num(q);
        os << ',' << num(l.ks_distance) << ',' << num(l.mean) << '\n';
    }
    run.add("distribution.csv", os.str());
}

// ---------------------------------------------------------------- manifest

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_outputs(Run& run, double elapsed, const std::string& started) {
    if (run.out.empty()) {
        // Primary output first on standard output; summaries follow when there is no directory.
        for (const auto& o : run.outputs) std::cout << o.content;
        return;
    }
    fs::create_directories(run.out);
    json files = json::array();
    for (const auto& o : run.outputs) {
        std::ofstream f(fs::path(run.out) / o.name, std::ios::binary);
        f << o.content;
        files.push_back(o.name);
    }
    json m;
    m["schema_version"] = kSchemaVersion;
    m["kind"] = "manifest";
    m["command"] = run.command;
    m["config"] = run.config;
    m["seed"] = run.seed;
    m["threads"] = run.threads;
    m["parameters"] = run.parameters;
    m["args"] = run.args;
    m["outputs"] = files;
    m["versions"] = {{"selfsim", kVersion},
                     {"compiler", __VERSION__},
                     {"cli11", CLI11_VERSION},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["wall_clock"] = {{"started", started}, {"elapsed_seconds", elapsed}};
    std::ofstream f(fs::path(run.out) / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
}

int run_cli(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, const std::string& out) {
    auto m = json::parse(read_file(manifest_path), nullptr, false);
    if (m.is_discarded() || !m.contains("args")) throw UsageError(manifest_path + " is not a manifest");
    fs::path src = fs::path(manifest_path).parent_path();
    if (out.empty()) throw UsageError("replay needs --out");
    if (fs::exists(out) && fs::equivalent(out, src.empty() ? fs::path(".") : src))
        throw UsageError("replay --out must differ from the manifest directory");
    auto args = m["args"].get<std::vector<std::string>>();
    args.push_back("--out");
    args.push_back(out);
    int code = run_cli(args);
    bool same = true;
    for (const auto& name : m["outputs"]) {
        std::string n = name.get<std::string>();
        bool eq = fs::exists(fs::path(out) / n) && read_file((src / n).string()) == read_file((fs::path(out) / n).string());
        std::cerr << (eq ? "identical " : "differs   ") << n << '\n';
        same = same && eq;
    }
    if (code != ok) return code;
    return same ? ok : replay_mismatch;
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Second-order ergodic averages for substitution systems", "selfsim"};
    app.require_subcommand(1);
    Run run;
    DensityArgs da;
    SeriesArgs sa;
    OrbitArgs oa;
    std::string letter, manifest;
    int levels = 8, samples = 10000;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", run.config, "substitution or matrix fixture (JSON)")->required();
        sub->add_option("--seed", run.seed, "RNG seed");
        sub->add_option("--threads", run.threads, "worker threads, 0 = all");
        sub->add_option("--out", run.out, "output directory (writes a manifest)");
    };
    auto c_opts = [&](CLI::App* sub) {
        sub->add_option("--c", sa.c, "average density c");
        sub->add_option("--c-from", sa.c_from, "density.json to read c_hat from");
    };
    auto orbit_opts = [&](CLI::App* sub) {
        sub->add_option("--orbit", oa.orbit, "random (nu-sampled) or fixed (fixed point)");
        sub->add_option("--orbits", oa.orbits, "number of random orbits");
    };

    auto* an = app.add_subcommand("analyze", "admissibility report and spectral summary");
    common(an);

    auto* de = app.add_subcommand("density", "average density c");
    common(de);
    de->add_option("--method", da.method, "pointwise, birkhoff or both");
    de->add_option("--k", da.k, "scale range in log_lambda units");
    de->add_option("--replicas", da.replicas, "independent replicas");
    de->add_option("--step", da.step, "trapezoid step in t");
    de->add_option("--side", da.side, "symmetric, right or left (1-D)");
    de->add_flag("--direct", da.direct, "measure one-sided balls directly instead of transporting");

    auto* so = app.add_subcommand("second-order", "second-order ergodic series");
    common(so);
    c_opts(so);
    orbit_opts(so);
    so->add_option("--n", sa.n, "orbit length (1-D)");
    so->add_option("--R", sa.R, "largest radius");
    so->add_option("--f", sa.f, "observable as letter:weight,...");
    so->add_option("--engine", sa.engine, "symbolic or tiling (1-D)");
    so->add_option("--origin", sa.origin, "random or corner (2-D)");
    so->add_option("--origins", sa.origins, "random origins (2-D)");

    auto* fr = app.add_subcommand("frequency", "alpha-dimensional frequency of a B-letter");
    common(fr);
    c_opts(fr);
    orbit_opts(fr);
    fr->add_option("--n", sa.n, "orbit length");
    fr->add_option("--letter", letter, "B-letter");

    auto* lf = app.add_subcommand("logfreq", "logarithmic letter frequency");
    common(lf);
    orbit_opts(lf);
    lf->add_option("--n", sa.n, "orbit length");
    lf->add_option("--letter", letter, "letter");

    auto* di = app.add_subcommand("distribution", "rescaled ergodic sums over random starting points");
    common(di);
    di->add_option("--levels", levels, "largest level n");
    di->add_option("--samples", samples, "samples per level");
    di->add_option("--f", sa.f, "observable as letter:weight,...");

    auto* rp = app.add_subcommand("replay", "re-run a manifest and compare outputs byte for byte");
    rp->add_option("--manifest", manifest, "manifest.json")->required();
    rp->add_option("--out", run.out, "fresh output directory")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    }

    auto* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    if (run.command == "replay") return cmd_replay(manifest, run.out);

    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) continue;
        run.args.push_back(args[i]);
    }
    for (auto* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--out" || opt->count() == 0) continue;
        auto res = opt->results();
        run.parameters[opt->get_name()] = res.empty() ? "true" : res.back();
    }

    std::string started = utc_now();
    auto t0 = std::chrono::steady_clock::now();
    int code = ok;
    if (run.command == "analyze") cmd_analyze(run, code);
    else if (run.command == "density") cmd_density(run, da);
    else if (run.command == "second-order") cmd_second_order(run, sa, oa);
    else if (run.command == "frequency") cmd_frequency(run, sa, oa, letter);
    else if (run.command == "logfreq") cmd_logfreq(run, sa, oa, letter);
    else if (run.command == "distribution") cmd_distribution(run, sa, levels, samples);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(run, elapsed, started);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return usage;
    } catch (const AdmissibilityError& e) {
        std::cerr << e.what() << '\n';
        return inadmissible;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << '\n';
        return precision;
    } catch (const CoverageError& e) {
        std::cerr << "coverage error: " << e.what() << " (max usable " << e.max_usable << ")\n";
        return coverage;
    } catch (const LengthCapError& e) {
        std::cerr << "coverage error: " << e.what() << '\n';
        return coverage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
}
