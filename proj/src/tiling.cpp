#include "selfsim/tiling.hpp"

#include "selfsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfsim {

LengthVector suspension_lengths(const Substitution& sub) {
    LengthVector lv;
    CountMatrix m = substitution_matrix(sub);
    if (sub.dim == 2) {
        lv.xi.assign(sub.size(), 1.0);
        lv.rho = static_cast<double>(sub.q) * sub.q;
        return lv;
    }
    lv.xi = dominant_left_vector(m, Normalization::min_one, kPowerTol, &lv.rho, &lv.residual);
    return lv;
}

double tiling_length(const Word& w, const LengthVector& xi) {
    double s = 0;
    for (Letter c : w) s += xi.xi[c];
    return s;
}

CoverageError::CoverageError(const std::string& what, double max_usable_)
    : std::runtime_error(what), max_usable(max_usable_) {}

Tiling1DWindow window_from_sequence(const Word& left, const Word& right, const LengthVector& xi) {
    if (right.empty()) throw std::invalid_argument("window needs x(0)");
    Tiling1DWindow win;
    win.first_index = -static_cast<std::int64_t>(left.size());
    win.letters = left;
    win.letters.insert(win.letters.end(), right.begin(), right.end());
    win.bounds.resize(win.letters.size() + 1);
    std::size_t zero = left.size();
    win.bounds[zero] = -xi.xi[right[0]] / 2;
    for (std::size_t i = zero; i < win.letters.size(); ++i) win.bounds[i + 1] = win.bounds[i] + xi.xi[win.letters[i]];
    for (std::size_t i = zero; i-- > 0;) win.bounds[i] = win.bounds[i + 1] - xi.xi[win.letters[i]];
    return win;
}

BTileCounter::BTileCounter(const Tiling1DWindow& win, const std::vector<bool>& is_b) {
    for (std::int64_t i = 0; i <= win.last_index(); ++i)
        if (win.left(i) >= 0 && is_b[win.at(i)]) ends_.push_back(win.right(i));
    reach_ = win.right(win.last_index());
}

std::uint64_t BTileCounter::operator()(double t) const {
    if (t > reach_)
        throw CoverageError("window ends at " + std::to_string(reach_) + ", before t = " + std::to_string(t), reach_);
    return static_cast<std::uint64_t>(std::upper_bound(ends_.begin(), ends_.end(), t) - ends_.begin());
}

std::uint64_t count_B_tiles_1d(const Tiling1DWindow& win, const std::vector<bool>& is_b, double t) {
    double reach = win.right(win.last_index());
    if (t > reach)
        throw CoverageError("window ends at " + std::to_string(reach) + ", before t = " + std::to_string(t), reach);
    std::uint64_t n = 0;
    for (std::int64_t i = 0; i <= win.last_index() && win.right(i) <= t; ++i)
        if (win.left(i) >= 0 && is_b[win.at(i)]) ++n;
    return n;
}

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
    std::vector<double> g;
    if (!(ratio > 1) || !(lo > 0) || hi < lo) throw std::invalid_argument("bad geometric grid");
    double steps = std::floor(std::log(hi / lo) / std::log(ratio) + 1e-9);
    for (long i = 0; i <= static_cast<long>(steps); ++i) g.push_back(lo * std::pow(ratio, static_cast<double>(i)));
    if (g.back() < hi * (1 - 1e-12)) g.push_back(hi);
    else g.back() = hi;
    return g;
}

std::vector<GrowthRow> btile_growth_scan(const Tiling1DWindow& win, const std::vector<bool>& is_b,
                                         double alpha, const std::vector<double>& t_grid) {
    BTileCounter count(win, is_b);
    std::vector<GrowthRow> rows;
    double running = 0;
    for (double t : t_grid) {
        GrowthRow r;
        r.t = t;
        r.count = count(t);
        r.ratio = static_cast<double>(r.count) / std::pow(t, alpha);
        running = std::max(running, r.ratio);
        r.running_max = running;
        rows.push_back(r);
    }
    return rows;
}

std::vector<LengthRatioPoint> lemma_length_ratio(const Word& x, const LengthVector& xi,
                                                 const std::vector<std::uint64_t>& n_grid) {
    std::vector<LengthRatioPoint> out;
    double len = 0;
    std::uint64_t k = 0;
    for (auto n : n_grid) {
        if (n + 1 > x.size()) throw CoverageError("sequence shorter than n = " + std::to_string(n), static_cast<double>(x.size() - 1));
        while (k < n) len += xi.xi[x[++k]];
        out.push_back({n, len / static_cast<double>(n)});
    }
    return out;
}

double R_k(const Word& x, const LengthVector& xi, std::size_t k) {
    double len = xi.xi[x[0]] / 2;
    for (std::size_t i = 1; i <= k; ++i) len += xi.xi[x[i]];
    return len;
}

GridPatch default_seed(const Substitution& sub, Letter b) {
    if (sub.dim != 2) throw std::invalid_argument("grid patches need a 2-D substitution");
    GridPatch p;
    p.rows = p.cols = 2;
    p.labels.assign(4, b);
    return p;
}

GridPatch grid_patch(const Substitution& sub, const GridPatch& seed, int n, std::size_t side_cap) {
    if (sub.dim != 2) throw std::invalid_argument("grid patches need a 2-D substitution");
    for (Letter c : seed.labels)
        if (c >= sub.size()) throw std::invalid_argument("seed label outside the alphabet");
    std::size_t q = static_cast<std::size_t>(sub.q);
    std::size_t rows = seed.rows, cols = seed.cols;
    for (int i = 0; i < n; ++i) {
        rows *= q;
        cols *= q;
        if (std::max(rows, cols) > side_cap)
            throw LengthCapError(std::max(rows, cols), side_cap);
    }
    GridPatch cur = seed;
    for (int step = 0; step < n; ++step) {
        GridPatch next;
        next.rows = cur.rows * q;
        next.cols = cur.cols * q;
        next.level = cur.level + 1;
        next.labels.resize(next.rows * next.cols);
        for (std::size_t r = 0; r < cur.rows; ++r)
            for (std::size_t c = 0; c < cur.cols; ++c) {
                const Word& img = sub.rules[cur.at(r, c)];
                for (std::size_t i = 0; i < q; ++i)
                    std::copy_n(img.begin() + static_cast<std::ptrdiff_t>(i * q), q,
                                next.labels.begin() + static_cast<std::ptrdiff_t>((r * q + i) * next.cols + c * q));
            }
        cur = std::move(next);
    }
    return cur;
}

namespace {

// Cell (i, j) as [x0, x0+1] x [y0, y0+1].
inline double cell_x0(const GridPatch& p, std::size_t j) { return static_cast<double>(j) - static_cast<double>(p.cols) / 2; }
inline double cell_y0(const GridPatch& p, std::size_t i) {
    return static_cast<double>(p.rows) / 2 - static_cast<double>(i) - 1;
}

inline double far_corner(double x0, double y0) {
    double fx = std::max(std::abs(x0), std::abs(x0 + 1)), fy = std::max(std::abs(y0), std::abs(y0 + 1));
    return std::sqrt(fx * fx + fy * fy);
}

}  // namespace

std::uint64_t count_B_tiles_ball_2d(const GridPatch& patch, const std::vector<bool>& is_b, double R, int threads) {
    double half = std::min(patch.rows, patch.cols) / 2.0;
    if (R > half)
        throw CoverageError("patch of level " + std::to_string(patch.level) + " covers radius " +
                                std::to_string(half) + " only; R = " + std::to_string(R) + " needs a larger level",
                            half);
    double R2 = R * R;
    auto rows = static_cast<std::int64_t>(patch.rows);
    int nt = resolve_threads(threads);
    std::uint64_t total = 0;
#pragma omp parallel for num_threads(nt) reduction(+ : total) schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        double y0 = cell_y0(patch, static_cast<std::size_t>(i));
        double fy = std::max(std::abs(y0), std::abs(y0 + 1));
        if (fy * fy > R2) continue;
        for (std::size_t j = 0; j < patch.cols; ++j) {
            if (!is_b[patch.at(static_cast<std::size_t>(i), j)]) continue;
            double x0 = cell_x0(patch, j);
            double fx = std::max(std::abs(x0), std::abs(x0 + 1));
            if (fx * fx + fy * fy <= R2) ++total;
        }
    }
    return total;
}

std::vector<double> btile_far_distances(const GridPatch& patch, const std::vector<bool>& is_b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < patch.rows; ++i)
        for (std::size_t j = 0; j < patch.cols; ++j)
            if (is_b[patch.at(i, j)]) d.push_back(far_corner(cell_x0(patch, j), cell_y0(patch, i)));
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<std::vector<double>> level_weights(const Substitution& sub, const std::vector<double>& letter_weight,
                                               int levels) {
    std::vector<std::vector<double>> w(static_cast<std::size_t>(levels) + 1);
    w[0] = letter_weight;
    for (int m = 1; m <= levels; ++m) {
        w[m].assign(sub.size(), 0.0);
        for (std::size_t a = 0; a < sub.size(); ++a)
            for (Letter c : sub.rules[a]) w[m][a] += w[m - 1][c];
    }
    return w;
}

namespace {

double ipow(double b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

void count_node(const Substitution& sub, const std::vector<std::vector<double>>& weights, Letter a, int m,
                double x0, double ytop, double R2, double& acc) {
    if (weights[static_cast<std::size_t>(m)][a] == 0) return;
    double side = ipow(static_cast<double>(sub.q), m);
    double x1 = x0 + side, y0 = ytop - side;
    double nx = std::max({0.0, x0, -x1}), ny = std::max({0.0, y0, -ytop});
    if (nx * nx + ny * ny >= R2 && m > 0) return;
    double fx = std::max(std::abs(x0), std::abs(x1)), fy = std::max(std::abs(y0), std::abs(ytop));
    if (fx * fx + fy * fy <= R2) {
        acc += weights[static_cast<std::size_t>(m)][a];
        return;
    }
    if (m == 0) return;
    std::size_t q = static_cast<std::size_t>(sub.q);
    double sub_side = side / static_cast<double>(q);
    const Word& img = sub.rules[a];
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
            count_node(sub, weights, img[i * q + j], m - 1, x0 + static_cast<double>(j) * sub_side,
                       ytop - static_cast<double>(i) * sub_side, R2, acc);
}

}  // namespace

double weighted_ball_count(const Substitution& sub, const std::vector<std::vector<double>>& weights,
                           const Supertile2D& tile, double R) {
    if (static_cast<std::size_t>(tile.level) >= weights.size())
        throw std::invalid_argument("weight table shallower than the supertile");
    double x0 = -static_cast<double>(tile.oj) - 0.5;
    double ytop = static_cast<double>(tile.oi) + 0.5;
    double acc = 0;
    count_node(sub, weights, tile.top, tile.level, x0, ytop, R * R, acc);
    return acc;
}

bool disk_inside_supertile(const Substitution& sub, const Supertile2D& tile, double R) {
    double side = ipow(static_cast<double>(sub.q), tile.level);
    double left = static_cast<double>(tile.oj) + 0.5, right = side - left;
    double top = static_cast<double>(tile.oi) + 0.5, bottom = side - top;
    return std::min({left, right, top, bottom}) >= R;
}

std::string patch_to_text(const Substitution& sub, const GridPatch& patch) {
    std::ostringstream os;
    os << "# rows " << patch.rows << " cols " << patch.cols << " level " << patch.level << '\n';
    for (std::size_t i = 0; i < patch.rows; ++i) {
        for (std::size_t j = 0; j < patch.cols; ++j) os << sub.alphabet[patch.at(i, j)];
        os << '\n';
    }
    return os.str();
}

std::string counts_csv(const std::vector<std::pair<double, std::uint64_t>>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "R,N\n";
    for (const auto& [r, n] : rows) os << r << ',' << n << '\n';
    return os.str();
}

}  // namespace selfsim
