#pragma once

#include "selfsim/rng.hpp"
#include "selfsim/subcore.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

using Vec2 = std::array<double, 2>;

// f_e(x) = (x + u) / λ maps the support of dst into the support of src.
// slot is the position of the occurrence in σ(src) (row-major cell index in 2-D).
struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    Vec2 u{0, 0};
    std::size_t slot = 0;
};

struct GdifsGraph {
    int dim = 1;
    double lambda = 0;
    double rho = 0;                         // ρ(B)
    std::vector<Letter> letters;            // vertex -> letter
    std::vector<int> vertex_of;             // letter -> vertex, -1 for A-letters
    std::vector<double> extent;             // hull half-width of each support
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> out;
    bool overlap = false;                   // some sibling hulls share interior points
    bool lattice = false;                   // integer λ and half-integer displacements

    std::size_t vertex_count() const { return letters.size(); }
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// b_letters in vertex order; xi_len per letter (ignored in 2-D).
GdifsGraph build_graph(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                       const std::vector<double>& xi_len, double lambda, double rho_B);

double dimension(const GdifsGraph& g);

struct Projection {
    Vec2 point{0, 0};
    double error_bound = 0;
};
// Partial sum of Σ λ^{-n-1} u_{e_n} over the first `terms` edges of the path.
Projection natural_projection(const GdifsGraph& g, const std::vector<std::size_t>& path,
                              std::size_t terms);
Projection natural_projection(const GdifsGraph& g, const std::vector<std::size_t>& path);

bool composable(const GdifsGraph& g, const std::vector<std::size_t>& path);

// h is the left PF eigenvector of B; vertex v's attractor carries mass h[v].
struct MassVector {
    std::vector<double> h;
    std::string convention = "sum(xi_tr*h)=1";
    double total() const;
};

// h_{r(e_n)} / ρ^{n+1}.
double cylinder_mass(const GdifsGraph& g, const MassVector& mass, const std::vector<std::size_t>& path);
// The probability version, divided by Σh.
double cylinder_measure(const GdifsGraph& g, const MassVector& mass, const std::vector<std::size_t>& path);

struct MarkovSampler {
    const GdifsGraph* graph = nullptr;
    std::vector<double> start;              // w / Σw
    std::vector<double> prob;               // per edge
    std::uint64_t seed = 0;
};

MarkovSampler make_sampler(const GdifsGraph& g, const MassVector& mass, std::uint64_t seed);
double max_outgoing_defect(const MarkovSampler& s);

std::size_t draw_start(const MarkovSampler& s, Stream& rng);
std::size_t draw_edge(const MarkovSampler& s, std::size_t vertex, Stream& rng);
std::vector<std::size_t> sample_path(const MarkovSampler& s, Stream& rng, std::size_t length);
// Replica-indexed convenience: stream (seed, sampler, index).
std::vector<std::size_t> sample_path(const MarkovSampler& s, std::uint64_t index, std::size_t length);

// 1-D: symmetric [x-r, x+r], right [x, x+r], left [x-r, x]. 2-D: closed disk.
enum class BallShape { symmetric, right, left };

struct Bracket {
    double lower = 0;
    double upper = 0;
};

// Absolute-coordinate bracket of η_v(B_r(x)) from cylinders up to a fixed depth.
Bracket ball_measure_bracket(const GdifsGraph& g, const MassVector& mass, std::size_t vertex,
                             Vec2 x, double r, int depth, BallShape shape = BallShape::symmetric);

// Positions along one path: y[j] = π(S^j e), all in the frame of vertex s(e_j).
class PathFrame {
public:
    PathFrame(const GdifsGraph& g, std::vector<std::size_t> path);

    const std::vector<std::size_t>& path() const { return path_; }
    std::size_t start_vertex() const;
    Vec2 y(std::size_t j) const { return y_[j]; }
    Vec2 point() const { return y_[0]; }
    std::size_t usable_depth() const { return usable_; }

private:
    std::vector<std::size_t> path_;
    std::vector<Vec2> y_;
    std::size_t start_ = 0;
    std::size_t usable_ = 0;
};

// A depth-j cylinder seen from the path: its hull centre is D - y_j in units of λ^{-j}.
struct RelCell {
    Vec2 D{0, 0};
    std::size_t vertex = 0;
};

struct BracketOptions {
    double tol = 1e-4;   // relative width at which descent may stop
    int e_min = 4;       // levels below floor(t) always explored
    int e_max = 24;      // hard stop below floor(t)
};
BracketOptions default_bracket_options(int dim);

struct ScaledBracket {
    double lower = 0;
    double upper = 0;
    int depth = 0;
};

// η(B_r(x)) for r = λ^{-t}, descending from the given depth-j0 cells.
ScaledBracket relative_bracket(const GdifsGraph& g, const MassVector& mass, const PathFrame& frame,
                               const std::vector<RelCell>& cells, int j0, double t, BallShape shape,
                               const BracketOptions& opt);
ScaledBracket relative_bracket(const GdifsGraph& g, const MassVector& mass, const PathFrame& frame,
                               double t, BallShape shape, const BracketOptions& opt);

// Depth-(j+1) cells meeting the scaled unit ball, from the depth-j list.
std::vector<RelCell> zoom_frontier(const GdifsGraph& g, const PathFrame& frame,
                                   const std::vector<RelCell>& frontier, std::size_t j);

enum class DensityMethod { pointwise, birkhoff };
const char* to_string(DensityMethod m);
const char* to_string(BallShape s);

struct DensityOptions {
    DensityMethod method = DensityMethod::pointwise;
    int k = 40;
    double step = 1.0 / 32;
    int replicas = 64;
    BallShape side = BallShape::symmetric;
    bool transport = true;       // one-sided density through η(B_r)/(2r^α)
    std::uint64_t seed = 1;
    int threads = 0;
    BracketOptions bracket{};
    double max_systematic = 0.05;
};
DensityOptions default_density_options(const GdifsGraph& g);

struct DensityEstimate {
    DensityMethod method = DensityMethod::pointwise;
    BallShape side = BallShape::symmetric;
    bool transport = false;
    double alpha = 0;
    double c_hat = 0;
    double stderr_ = 0;
    double systematic_bound = 0;
    int k = 0;
    double step = 0;
    int replicas = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_replica;
};

class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DensityEstimate average_density(const GdifsGraph& g, const MassVector& mass, double alpha,
                                const DensityOptions& opt);
DensityEstimate average_density_pointwise(const GdifsGraph& g, const MassVector& mass, double alpha,
                                          DensityOptions opt);
DensityEstimate average_density_birkhoff(const GdifsGraph& g, const MassVector& mass, double alpha,
                                         DensityOptions opt);

// η-distributed attractor points, one per row.
std::vector<Vec2> point_cloud(const MarkovSampler& s, std::size_t count, std::size_t depth);

}  // namespace selfsim
