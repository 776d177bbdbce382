#include "selfsim/gdifs.hpp"

#include "selfsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selfsim {

namespace {

enum class Verdict { inside, outside, undecided };

Verdict classify(int dim, Vec2 z, double e, double s, BallShape shape, double margin) {
    if (dim == 2) {
        double dx = std::max(0.0, std::abs(z[0]) - e), dy = std::max(0.0, std::abs(z[1]) - e);
        double fx = std::abs(z[0]) + e, fy = std::abs(z[1]) + e;
        double near = std::sqrt(dx * dx + dy * dy), far = std::sqrt(fx * fx + fy * fy);
        if (far <= s - margin) return Verdict::inside;
        if (near >= s + margin) return Verdict::outside;
        return Verdict::undecided;
    }
    double a = -s, b = s;
    if (shape == BallShape::right) a = 0;
    if (shape == BallShape::left) b = 0;
    double lo = z[0] - e, hi = z[0] + e;
    if (lo >= a + margin && hi <= b - margin) return Verdict::inside;
    if (hi <= a - margin || lo >= b + margin) return Verdict::outside;
    return Verdict::undecided;
}

double margin_for(const GdifsGraph& g, double s, double e) {
    return (g.lattice ? 1e-12 : 1e-9) * (s + e);
}

std::size_t tail_levels(double lambda) {
    return static_cast<std::size_t>(std::ceil(60.0 * std::log(2.0) / std::log(lambda))) + 2;
}

}  // namespace

GdifsGraph build_graph(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                       const std::vector<double>& xi_len, double lambda, double rho_B) {
    GdifsGraph g;
    g.dim = sub.dim;
    g.lambda = sub.dim == 2 ? static_cast<double>(sub.q) : lambda;
    g.rho = rho_B;
    g.vertex_of.assign(sub.size(), -1);
    for (std::size_t v = 0; v < b_letters.size(); ++v) {
        g.letters.push_back(static_cast<Letter>(b_letters[v]));
        g.vertex_of[b_letters[v]] = static_cast<int>(v);
        g.extent.push_back(sub.dim == 2 ? 0.5 : xi_len[b_letters[v]] / 2);
    }
    g.out.resize(b_letters.size());
    for (std::size_t s = 0; s < b_letters.size(); ++s) {
        const Word& img = sub.rules[b_letters[s]];
        if (sub.dim == 1) {
            double total = 0;
            for (Letter c : img) total += xi_len[c];
            double want = g.lambda * xi_len[b_letters[s]];
            if (std::abs(total - want) > 1e-9 * want)
                throw GeometryError("tile lengths of σ(" + sub.alphabet[b_letters[s]] + ") sum to " +
                                    std::to_string(total) + ", expected " + std::to_string(want));
            double pos = -want / 2;
            for (std::size_t i = 0; i < img.size(); ++i) {
                double len = xi_len[img[i]];
                if (g.vertex_of[img[i]] >= 0) {
                    g.out[s].push_back(g.edges.size());
                    g.edges.push_back({s, static_cast<std::size_t>(g.vertex_of[img[i]]), {pos + len / 2, 0}, i});
                }
                pos += len;
            }
        } else {
            std::size_t q = static_cast<std::size_t>(sub.q);
            double mid = (static_cast<double>(q) - 1) / 2;
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) {
                    Letter c = img[i * q + j];
                    if (g.vertex_of[c] < 0) continue;
                    g.out[s].push_back(g.edges.size());
                    g.edges.push_back({s, static_cast<std::size_t>(g.vertex_of[c]),
                                       {static_cast<double>(j) - mid, mid - static_cast<double>(i)},
                                       i * q + j});
                }
        }
    }
    bool integral_lambda = std::abs(g.lambda - std::round(g.lambda)) < 1e-9;
    bool half_integral_u = true;
    for (const auto& e : g.edges)
        for (double c : e.u)
            if (std::abs(2 * c - std::round(2 * c)) > 1e-9) half_integral_u = false;
    g.lattice = integral_lambda && half_integral_u;
    for (std::size_t s = 0; s < g.out.size(); ++s)
        for (std::size_t a = 0; a < g.out[s].size(); ++a)
            for (std::size_t b = a + 1; b < g.out[s].size(); ++b) {
                const Edge& x = g.edges[g.out[s][a]];
                const Edge& y = g.edges[g.out[s][b]];
                double reach = g.extent[x.dst] + g.extent[y.dst] - 1e-9;
                bool hit = std::abs(x.u[0] - y.u[0]) < reach;
                if (g.dim == 2) hit = hit && std::abs(x.u[1] - y.u[1]) < reach;
                if (hit) g.overlap = true;
            }
    return g;
}

double dimension(const GdifsGraph& g) {
    if (!(g.rho > 1)) return 0.0;
    return std::log(g.rho) / std::log(g.lambda);
}

bool composable(const GdifsGraph& g, const std::vector<std::size_t>& path) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] >= g.edges.size()) return false;
        if (i > 0 && g.edges[path[i - 1]].dst != g.edges[path[i]].src) return false;
    }
    return true;
}

Projection natural_projection(const GdifsGraph& g, const std::vector<std::size_t>& path,
                              std::size_t terms) {
    terms = std::min(terms, path.size());
    Projection p;
    double scale = 1.0 / g.lambda, umax = 0;
    for (std::size_t n = 0; n < terms; ++n) {
        const Vec2& u = g.edges[path[n]].u;
        p.point[0] += scale * u[0];
        p.point[1] += scale * u[1];
        scale /= g.lambda;
    }
    for (const auto& e : g.edges) umax = std::max(umax, std::hypot(e.u[0], e.u[1]));
    p.error_bound = std::pow(g.lambda, -static_cast<double>(terms)) * umax / (g.lambda - 1);
    return p;
}

Projection natural_projection(const GdifsGraph& g, const std::vector<std::size_t>& path) {
    return natural_projection(g, path, path.size());
}

double MassVector::total() const { return std::accumulate(h.begin(), h.end(), 0.0); }

double cylinder_mass(const GdifsGraph& g, const MassVector& mass, const std::vector<std::size_t>& path) {
    if (path.empty()) return mass.total();
    return mass.h[g.edges[path.back()].dst] / std::pow(g.rho, static_cast<double>(path.size()));
}

double cylinder_measure(const GdifsGraph& g, const MassVector& mass, const std::vector<std::size_t>& path) {
    return cylinder_mass(g, mass, path) / mass.total();
}

MarkovSampler make_sampler(const GdifsGraph& g, const MassVector& mass, std::uint64_t seed) {
    MarkovSampler s;
    s.graph = &g;
    s.seed = seed;
    double tot = mass.total();
    for (double w : mass.h) s.start.push_back(w / tot);
    for (const auto& e : g.edges) s.prob.push_back(mass.h[e.dst] / (g.rho * mass.h[e.src]));
    return s;
}

double max_outgoing_defect(const MarkovSampler& s) {
    double worst = 0;
    for (const auto& edges : s.graph->out) {
        double sum = 0;
        for (auto e : edges) sum += s.prob[e];
        worst = std::max(worst, std::abs(sum - 1));
    }
    return worst;
}

std::size_t draw_start(const MarkovSampler& s, Stream& rng) {
    double u = rng.uniform(), acc = 0;
    for (std::size_t v = 0; v < s.start.size(); ++v) {
        acc += s.start[v];
        if (u < acc) return v;
    }
    return s.start.size() - 1;
}

std::size_t draw_edge(const MarkovSampler& s, std::size_t vertex, Stream& rng) {
    const auto& edges = s.graph->out[vertex];
    double u = rng.uniform(), acc = 0;
    for (auto e : edges) {
        acc += s.prob[e];
        if (u < acc) return e;
    }
    return edges.back();
}

std::vector<std::size_t> sample_path(const MarkovSampler& s, Stream& rng, std::size_t length) {
    std::vector<std::size_t> path;
    path.reserve(length);
    if (length == 0) return path;
    std::size_t v = draw_start(s, rng);
    for (std::size_t i = 0; i < length; ++i) {
        std::size_t e = draw_edge(s, v, rng);
        path.push_back(e);
        v = s.graph->edges[e].dst;
    }
    return path;
}

std::vector<std::size_t> sample_path(const MarkovSampler& s, std::uint64_t index, std::size_t length) {
    Stream rng(s.seed, StreamTag::sampler, index);
    return sample_path(s, rng, length);
}

Bracket ball_measure_bracket(const GdifsGraph& g, const MassVector& mass, std::size_t vertex,
                             Vec2 x, double r, int depth, BallShape shape) {
    if (depth < 0 || depth > 64) throw std::invalid_argument("bracket depth exceeds cap of 64");
    struct Cell {
        Vec2 c;
        std::size_t v;
    };
    std::vector<Cell> cur{{{0, 0}, vertex}}, next;
    Bracket b;
    double scale = 1.0;  // λ^{-j}
    double cell_mass = 1.0;  // ρ^{-j}
    for (int j = 0;; ++j) {
        next.clear();
        for (const auto& cell : cur) {
            double e = g.extent[cell.v] * scale;
            Vec2 z{cell.c[0] - x[0], cell.c[1] - x[1]};
            Verdict v = classify(g.dim, z, e, r, shape, margin_for(g, r, e));
            double m = mass.h[cell.v] * cell_mass;
            if (v == Verdict::inside)
                b.lower += m;
            else if (v == Verdict::undecided) {
                if (j == depth)
                    b.upper += m;
                else
                    next.push_back(cell);
            }
        }
        if (j == depth || next.empty()) break;
        scale /= g.lambda;
        cell_mass /= g.rho;
        cur.clear();
        for (const auto& cell : next)
            for (auto ei : g.out[cell.v]) {
                const Edge& e = g.edges[ei];
                cur.push_back({{cell.c[0] + scale * e.u[0], cell.c[1] + scale * e.u[1]}, e.dst});
            }
    }
    b.upper += b.lower;
    return b;
}

PathFrame::PathFrame(const GdifsGraph& g, std::vector<std::size_t> path) : path_(std::move(path)) {
    if (path_.empty()) throw std::invalid_argument("empty path");
    start_ = g.edges[path_.front()].src;
    y_.assign(path_.size() + 1, Vec2{0, 0});
    for (std::size_t j = path_.size(); j-- > 0;) {
        const Vec2& u = g.edges[path_[j]].u;
        y_[j] = {(y_[j + 1][0] + u[0]) / g.lambda, (y_[j + 1][1] + u[1]) / g.lambda};
    }
    std::size_t tail = tail_levels(g.lambda);
    usable_ = path_.size() > tail ? path_.size() - tail : 0;
}

std::size_t PathFrame::start_vertex() const { return start_; }

BracketOptions default_bracket_options(int dim) {
    if (dim == 2) return {0.01, 5, 8};
    return {1e-4, 4, 24};
}

ScaledBracket relative_bracket(const GdifsGraph& g, const MassVector& mass, const PathFrame& frame,
                               const std::vector<RelCell>& cells, int j0, double t, BallShape shape,
                               const BracketOptions& opt) {
    int jt = static_cast<int>(std::floor(t));
    std::vector<RelCell> undecided, next;
    ScaledBracket out;
    int depth = j0;
    auto classify_into = [&](const std::vector<RelCell>& list, int j, std::vector<RelCell>& keep) {
        double s = std::pow(g.lambda, static_cast<double>(j) - t);
        double cell_mass = std::pow(g.rho, -static_cast<double>(j));
        Vec2 y = frame.y(static_cast<std::size_t>(j));
        for (const auto& c : list) {
            double e = g.extent[c.vertex];
            Vec2 z{c.D[0] - y[0], c.D[1] - y[1]};
            Verdict v = classify(g.dim, z, e, s, shape, margin_for(g, s, e));
            if (v == Verdict::inside)
                out.lower += mass.h[c.vertex] * cell_mass;
            else if (v == Verdict::undecided)
                keep.push_back(c);
        }
    };
    classify_into(cells, depth, undecided);
    for (;;) {
        double cell_mass = std::pow(g.rho, -static_cast<double>(depth));
        double width = 0;
        for (const auto& c : undecided) width += mass.h[c.vertex] * cell_mass;
        bool done = undecided.empty() || depth >= jt + opt.e_max ||
                    (depth >= jt + opt.e_min && width <= opt.tol * (out.lower + width / 2));
        if (done) {
            out.upper = out.lower + width;
            out.depth = depth;
            return out;
        }
        if (static_cast<std::size_t>(depth) >= frame.usable_depth())
            throw PrecisionError("sample path too short for bracket depth " + std::to_string(depth + 1));
        const Edge& along = g.edges[frame.path()[static_cast<std::size_t>(depth)]];
        next.clear();
        for (const auto& c : undecided)
            for (auto ei : g.out[c.vertex]) {
                const Edge& e = g.edges[ei];
                next.push_back({{g.lambda * c.D[0] + e.u[0] - along.u[0], g.lambda * c.D[1] + e.u[1] - along.u[1]},
                                e.dst});
            }
        ++depth;
        undecided.clear();
        classify_into(next, depth, undecided);
    }
}

ScaledBracket relative_bracket(const GdifsGraph& g, const MassVector& mass, const PathFrame& frame,
                               double t, BallShape shape, const BracketOptions& opt) {
    std::vector<RelCell> root{{{0, 0}, frame.start_vertex()}};
    return relative_bracket(g, mass, frame, root, 0, t, shape, opt);
}

std::vector<RelCell> zoom_frontier(const GdifsGraph& g, const PathFrame& frame,
                                   const std::vector<RelCell>& frontier, std::size_t j) {
    if (j >= frame.usable_depth()) throw PrecisionError("sample path too short for zoom depth " + std::to_string(j + 1));
    const Edge& along = g.edges[frame.path()[j]];
    Vec2 y = frame.y(j + 1);
    std::vector<RelCell> out;
    for (const auto& c : frontier)
        for (auto ei : g.out[c.vertex]) {
            const Edge& e = g.edges[ei];
            RelCell child{{g.lambda * c.D[0] + e.u[0] - along.u[0], g.lambda * c.D[1] + e.u[1] - along.u[1]},
                          e.dst};
            Vec2 z{child.D[0] - y[0], child.D[1] - y[1]};
            double ext = g.extent[e.dst];
            if (classify(g.dim, z, ext, 1.0, BallShape::symmetric, margin_for(g, 1.0, ext)) != Verdict::outside)
                out.push_back(child);
        }
    return out;
}

const char* to_string(DensityMethod m) { return m == DensityMethod::pointwise ? "pointwise" : "birkhoff"; }

const char* to_string(BallShape s) {
    switch (s) {
        case BallShape::symmetric: return "symmetric";
        case BallShape::right: return "right";
        case BallShape::left: return "left";
    }
    return "symmetric";
}

DensityOptions default_density_options(const GdifsGraph& g) {
    DensityOptions o;
    o.bracket = default_bracket_options(g.dim);
    if (g.dim == 2) o.k = 20;
    return o;
}

namespace {

struct ReplicaResult {
    double value = 0;
    double half_width = 0;
};

ReplicaResult run_replica(const GdifsGraph& g, const MassVector& mass, double alpha,
                          const DensityOptions& opt, const MarkovSampler& sampler, std::size_t index) {
    StreamTag tag = opt.method == DensityMethod::pointwise ? StreamTag::pointwise : StreamTag::birkhoff;
    Stream rng(opt.seed, tag, index);
    std::size_t len = static_cast<std::size_t>(opt.k + opt.bracket.e_max + 2) + tail_levels(g.lambda);
    PathFrame frame(g, sample_path(sampler, rng, len));

    bool one_sided = g.dim == 1 && opt.side != BallShape::symmetric;
    bool transport = one_sided && opt.transport;
    BallShape shape = (g.dim == 2 || transport) ? BallShape::symmetric : opt.side;

    std::vector<RelCell> frontier{{{0, 0}, frame.start_vertex()}};
    std::size_t jf = 0;
    long steps = std::lround(opt.k / opt.step);
    double acc = 0, acc_w = 0, prev = 0, prev_w = 0;
    for (long i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) * opt.step;
        ScaledBracket br;
        if (opt.method == DensityMethod::pointwise) {
            br = relative_bracket(g, mass, frame, t, shape, opt.bracket);
        } else {
            auto jt = static_cast<std::size_t>(std::floor(t));
            while (jf < jt) frontier = zoom_frontier(g, frame, frontier, jf++);
            br = relative_bracket(g, mass, frame, frontier, static_cast<int>(jf), t, shape, opt.bracket);
        }
        double r = std::pow(g.lambda, -t);
        double norm;
        if (!one_sided)
            norm = std::pow(2 * r, alpha);
        else if (transport)
            norm = 2 * std::pow(r, alpha);
        else
            norm = std::pow(r, alpha);
        double mid = 0.5 * (br.lower + br.upper) / norm;
        double half = 0.5 * (br.upper - br.lower) / norm;
        if (i > 0) {
            acc += 0.5 * (mid + prev) * opt.step;
            acc_w += 0.5 * (half + prev_w) * opt.step;
        }
        prev = mid;
        prev_w = half;
    }
    return {acc / opt.k, acc_w / opt.k};
}

}  // namespace

DensityEstimate average_density(const GdifsGraph& g, const MassVector& mass, double alpha,
                                const DensityOptions& opt) {
    if (opt.k <= 0 || opt.replicas <= 0 || !(opt.step > 0)) throw std::invalid_argument("k, replicas and step must be positive");
    MarkovSampler sampler = make_sampler(g, mass, opt.seed);
    auto results = parallel_map<ReplicaResult>(static_cast<std::size_t>(opt.replicas), opt.threads,
                                               [&](std::size_t i) { return run_replica(g, mass, alpha, opt, sampler, i); });
    DensityEstimate est;
    est.method = opt.method;
    est.side = g.dim == 2 ? BallShape::symmetric : opt.side;
    est.transport = g.dim == 1 && opt.side != BallShape::symmetric && opt.transport;
    est.alpha = alpha;
    est.k = opt.k;
    est.step = opt.step;
    est.replicas = opt.replicas;
    est.seed = opt.seed;
    double sum = 0, sum_w = 0;
    for (const auto& r : results) {
        est.per_replica.push_back(r.value);
        sum += r.value;
        sum_w += r.half_width;
    }
    double n = static_cast<double>(results.size());
    est.c_hat = sum / n;
    est.systematic_bound = sum_w / n;
    double ss = 0;
    for (double v : est.per_replica) ss += (v - est.c_hat) * (v - est.c_hat);
    est.stderr_ = results.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    if (est.systematic_bound > opt.max_systematic * est.c_hat)
        throw PrecisionError("bracket precision unattainable: systematic bound " +
                             std::to_string(est.systematic_bound) + " exceeds " +
                             std::to_string(opt.max_systematic) + " of c_hat " + std::to_string(est.c_hat));
    return est;
}

DensityEstimate average_density_pointwise(const GdifsGraph& g, const MassVector& mass, double alpha,
                                          DensityOptions opt) {
    opt.method = DensityMethod::pointwise;
    return average_density(g, mass, alpha, opt);
}

DensityEstimate average_density_birkhoff(const GdifsGraph& g, const MassVector& mass, double alpha,
                                         DensityOptions opt) {
    opt.method = DensityMethod::birkhoff;
    return average_density(g, mass, alpha, opt);
}

std::vector<Vec2> point_cloud(const MarkovSampler& s, std::size_t count, std::size_t depth) {
    std::vector<Vec2> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(natural_projection(*s.graph, sample_path(s, i, depth)).point);
    return pts;
}

}  // namespace selfsim
