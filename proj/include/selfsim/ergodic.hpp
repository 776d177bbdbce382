#pragma once

#include "selfsim/gdifs.hpp"
#include "selfsim/rng.hpp"
#include "selfsim/spectral.hpp"
#include "selfsim/subcore.hpp"
#include "selfsim/tiling.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace selfsim {

// Right PF eigenvector of B, one entry per B-letter in vertex order, with Σ ξ_b ν_b = 1.
struct TransverseWeights {
    std::vector<double> xi_tr;
    std::string normalization = "sum(xi_len*xi_tr)=1";
    double residual = 0;
};

TransverseWeights transverse_weights(const CountMatrix& m, const std::vector<std::size_t>& b_letters,
                                     const LengthVector& xi_len);

struct MeasureNormalization {
    std::vector<double> nu;   // ν([b]) = xi_tr_b
    std::vector<double> h;    // mass vector with Σ ν h = 1
    double c0 = 0;            // Σ h
    double gamma = 0;         // 1 / Σ ν h before rescaling h
};

// h_raw is any left PF eigenvector of B.
MeasureNormalization measure_normalization(const std::vector<double>& xi_len_b, const TransverseWeights& tr,
                                           const std::vector<double>& h_raw);

// Per-letter weights of a cylinder function of the current letter.
struct Observable {
    std::vector<double> weights;
    bool formal = false;   // allow weight on A-letters

    double operator()(Letter a) const { return weights[a]; }
};

Observable indicator(std::size_t letters, Letter a);
// Rejects weights on A-letters unless formal.
void validate_observable(const Observable& f, const std::vector<bool>& is_b);
// Σ_b f(b) ν([b]) over B-letters.
double integral_nu(const Observable& f, const std::vector<std::size_t>& b_letters, const std::vector<double>& nu);

// P[k] = Σ_{i<k} f(x_i), k = 0..n.
std::vector<double> birkhoff_prefix_sums(const Word& x, const Observable& f, std::size_t n);

struct RatioRow {
    std::uint64_t n = 0;
    double sf = 0;
    double sg = 0;
    double ratio = 0;
    double target = 0;
};
std::vector<RatioRow> ratio_check(const Word& x, const Observable& f, const Observable& g,
                                  const std::vector<std::uint64_t>& n_grid, double target);

inline const double kReportRatio = std::exp2(1.0 / 8);

struct SecondOrderSeries {
    std::vector<double> grid;
    std::vector<double> partials;
    double target = 0;
    double alpha = 0;
    double c_used = 0;
    double final_partial = 0;
    double window = 0;        // (T_n - T_{n/10}) / log 10 over the final decade
    double oscillation = 0;   // max - min of the partials over the final decade
};

// Grid points in [2, n] with ratio ~2^{1/8}, rounded to integers, always ending at n.
std::vector<std::uint64_t> report_grid(std::uint64_t n, double ratio = kReportRatio);

// k^{-power} for k = 1..n, shared between orbits.
struct ScaleWeights {
    double power = 0;
    std::vector<double> w;   // w[k] = k^{-power}, w[0] unused
};
ScaleWeights make_scale_weights(double power, std::size_t n);

// partial(n) = (1/log n) Σ_{k=1}^n S_k / (c k^{α+1}) with S_k = Σ_{i<k} f(x_i).
SecondOrderSeries second_order_symbolic(const Word& x, const Observable& f, double alpha, double c,
                                        std::uint64_t n_max, double target, double ratio = kReportRatio);
SecondOrderSeries second_order_symbolic(const Word& x, const Observable& f, double alpha, double c,
                                        std::uint64_t n_max, double target, const ScaleWeights& kw,
                                        double ratio = kReportRatio);

// Σ_{1<=k<=n, x_k=b} k^{-α}, divided by log n on the report grid.
struct FrequencySeries {
    std::vector<double> grid;
    std::vector<double> partials;
    double target = 0;
    double final_partial = 0;
    double window = 0;
    double oscillation = 0;
};

FrequencySeries alpha_frequency(const Word& x, Letter b, double alpha, std::uint64_t n_max, double target,
                                double ratio = kReportRatio);
FrequencySeries alpha_frequency(const Word& x, Letter b, double alpha, std::uint64_t n_max, double target,
                                const ScaleWeights& kw, double ratio = kReportRatio);

FrequencySeries log_frequency(const Word& x, Letter a, std::uint64_t n_max, double target,
                              double ratio = kReportRatio);

// F_n from the prefix sums of 𝟙_b by summation by parts.
double frequency_by_parts(const std::vector<double>& prefix, double alpha, std::uint64_t n);

// One-sided suspension version: W(R) = ∫_0^R F(T-u) du with F = f/ξ on each tile;
// partial(t) = (1/log t) ∫_1^t W(R) / (c R^{α+1}) dR, integrated exactly per tile.
SecondOrderSeries second_order_tiling_1d(const Tiling1DWindow& win, const LengthVector& xi, const Observable& f,
                                         double alpha, double c, double R_max, double target,
                                         double ratio = kReportRatio);

// ν-random one-sided orbits: x(0) is a uniformly chosen B-position of σ^N(top).
struct OrbitSampler {
    const Substitution* sub = nullptr;
    std::vector<std::size_t> b_letters;
    std::vector<int> vertex_of;
    std::vector<double> top_weights;
    int depth = 0;
    LengthTable lengths;
    std::vector<std::vector<double>> b_counts;   // b_counts[m][a] = # B-letters in σ^m(a)
    std::uint64_t n = 0;
};

OrbitSampler make_orbit_sampler(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                const std::vector<double>& top_weights, double rho_A, std::uint64_t n);
// x(0) .. x(n).
Word sample_orbit(const OrbitSampler& s, Stream& rng);

// 2-D: ν-random B-cell of a level-L supertile as origin.
struct OriginSampler {
    const Substitution* sub = nullptr;
    std::vector<std::size_t> b_letters;
    std::vector<double> top_weights;
    int level = 0;
    std::vector<std::vector<double>> b_counts;
};
OriginSampler make_origin_sampler(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                  const std::vector<double>& top_weights, int level);
Supertile2D sample_origin(const OriginSampler& s, Stream& rng);

struct Tiling2DOptions {
    double R_max = 2187;
    double report_ratio = kReportRatio;
    int refine = 8;           // fine log grid = report grid ratio^{1/refine}
    int origins = 64;
    int extra_levels = 4;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct Tiling2DResult {
    SecondOrderSeries series;          // ensemble mean over origins
    std::vector<double> final_per_origin;
    double stderr_final = 0;
    int rejected = 0;
};

// weights: per-letter cell weight g.
Tiling2DResult second_order_tiling_2d(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                      const std::vector<double>& top_weights, const std::vector<double>& weights,
                                      double alpha, double c, double target, const Tiling2DOptions& opt);

// Same outer integral for the fixed patch around the shared corner of the seed.
SecondOrderSeries second_order_patch(const GridPatch& patch, const std::vector<bool>& is_b,
                                     const std::vector<double>& weights, double alpha, double c, double R_max,
                                     double target, double report_ratio = kReportRatio, int refine = 8);

// Log-grid outer integral: values[i] sampled at radii[i] (radii[0] = 1).
SecondOrderSeries log_average(const std::vector<double>& radii, const std::vector<double>& values,
                              int refine, double target);

struct DistributionLevel {
    int level = 0;
    std::uint64_t prefix = 0;
    std::vector<double> quantiles;   // at probabilities 0.1 .. 0.9
    double ks_distance = 0;
    double mean = 0;
};

std::vector<DistributionLevel> distribution_experiment(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                                       const std::vector<double>& top_weights, double rho_A,
                                                       double rho_B, const Observable& f, int n_levels,
                                                       std::size_t samples, std::uint64_t seed, int threads = 0);

double ks_uniform(std::vector<double> samples);

}  // namespace selfsim
