#pragma once

#include "selfsim/spectral.hpp"
#include "selfsim/subcore.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

// Tile lengths ξ (1-D) or cell areas (2-D, all 1), smallest entry 1.
struct LengthVector {
    std::vector<double> xi;
    Normalization normalization = Normalization::min_one;
    double rho = 0;
    double residual = 0;
};

LengthVector suspension_lengths(const Substitution& sub);

double tiling_length(const Word& w, const LengthVector& xi);

class CoverageError : public std::runtime_error {
public:
    CoverageError(const std::string& what, double max_usable_);
    double max_usable;
};

// Tile i (first_index <= i <= last_index()) is [bounds[i - first_index], bounds[i - first_index + 1]];
// tile 0 is centred at the origin.
struct Tiling1DWindow {
    Word letters;
    std::int64_t first_index = 0;
    std::vector<double> bounds;

    std::int64_t last_index() const { return first_index + static_cast<std::int64_t>(letters.size()) - 1; }
    Letter at(std::int64_t i) const { return letters[static_cast<std::size_t>(i - first_index)]; }
    double left(std::int64_t i) const { return bounds[static_cast<std::size_t>(i - first_index)]; }
    double right(std::int64_t i) const { return bounds[static_cast<std::size_t>(i - first_index) + 1]; }
};

// left holds x(-L) .. x(-1) in reading order, right holds x(0) x(1) ...
Tiling1DWindow window_from_sequence(const Word& left, const Word& right, const LengthVector& xi);

std::uint64_t count_B_tiles_1d(const Tiling1DWindow& win, const std::vector<bool>& is_b, double t);

// Repeated N(t) queries over one window.
class BTileCounter {
public:
    BTileCounter(const Tiling1DWindow& win, const std::vector<bool>& is_b);
    std::uint64_t operator()(double t) const;
    double reach() const { return reach_; }

private:
    std::vector<double> ends_;
    double reach_ = 0;
};

std::vector<double> geometric_grid(double lo, double hi, double ratio);

struct GrowthRow {
    double t = 0;
    std::uint64_t count = 0;
    double ratio = 0;
    double running_max = 0;
};
std::vector<GrowthRow> btile_growth_scan(const Tiling1DWindow& win, const std::vector<bool>& is_b,
                                         double alpha, const std::vector<double>& t_grid);

struct LengthRatioPoint {
    std::uint64_t n = 0;
    double ratio = 0;
};
// |x[1,n]|_T / n for x = x(0) x(1) ...
std::vector<LengthRatioPoint> lemma_length_ratio(const Word& x, const LengthVector& xi,
                                                 const std::vector<std::uint64_t>& n_grid);

// R_k = |x[1,k]|_T + ξ_{x(0)}/2, the right end of tile k.
double R_k(const Word& x, const LengthVector& xi, std::size_t k);

// Cells row-major, row 0 on top; the patch is centred at the origin, so cell (i, j)
// covers x in [j - cols/2, j - cols/2 + 1], y in [rows/2 - i - 1, rows/2 - i].
struct GridPatch {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Word labels;
    int level = 0;

    Letter at(std::size_t i, std::size_t j) const { return labels[i * cols + j]; }
    std::size_t origin_row() const { return rows / 2; }
    std::size_t origin_col() const { return cols / 2; }
};

inline constexpr std::size_t kDefaultPatchSide = 59049;

GridPatch default_seed(const Substitution& sub, Letter b);
GridPatch grid_patch(const Substitution& sub, const GridPatch& seed, int n,
                     std::size_t side_cap = kDefaultPatchSide);

// B-cells whose closed unit square lies in the closed disk of radius R about the origin.
std::uint64_t count_B_tiles_ball_2d(const GridPatch& patch, const std::vector<bool>& is_b, double R,
                                    int threads = 0);

// Sorted farthest-corner distances of the B-cells, for counting at many radii.
std::vector<double> btile_far_distances(const GridPatch& patch, const std::vector<bool>& is_b);

// σ^level(top) as a q^level square with the origin at the centre of cell (oi, oj).
struct Supertile2D {
    Letter top = 0;
    int level = 0;
    std::int64_t oi = 0;
    std::int64_t oj = 0;
};

// weight[m][a] = Σ of per-letter weights over the cells of σ^m(a).
std::vector<std::vector<double>> level_weights(const Substitution& sub, const std::vector<double>& letter_weight,
                                               int levels);

// Σ weights of cells whose closed square lies in the closed disk of radius R.
double weighted_ball_count(const Substitution& sub, const std::vector<std::vector<double>>& weights,
                           const Supertile2D& tile, double R);

bool disk_inside_supertile(const Substitution& sub, const Supertile2D& tile, double R);

std::string patch_to_text(const Substitution& sub, const GridPatch& patch);
std::string counts_csv(const std::vector<std::pair<double, std::uint64_t>>& rows);

}  // namespace selfsim
