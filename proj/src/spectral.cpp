#include "selfsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace selfsim {

namespace {

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix pattern(const CountMatrix& m) {
    BoolMatrix p(m.n, std::vector<bool>(m.n));
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) p[i][j] = m(i, j) > 0;
    return p;
}

BoolMatrix bool_multiply(const BoolMatrix& x, const BoolMatrix& y) {
    std::size_t n = x.size();
    BoolMatrix r(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (x[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (y[k][j]) r[i][j] = true;
    return r;
}

// reach[b][a]: a is reachable from b along b -> a iff M[a,b] > 0.
BoolMatrix reachability(const CountMatrix& m) {
    std::size_t n = m.n;
    BoolMatrix r(n, std::vector<bool>(n));
    for (std::size_t b = 0; b < n; ++b) {
        r[b][b] = true;
        for (std::size_t a = 0; a < n; ++a)
            if (m(a, b) > 0) r[b][a] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = true;
    return r;
}

std::vector<double> to_dense(const CountMatrix& m) {
    std::vector<double> d(m.a.size());
    for (std::size_t i = 0; i < m.a.size(); ++i) d[i] = static_cast<double>(m.a[i]);
    return d;
}

struct PowerResult {
    double rho = 0;
    std::vector<double> vec;
    double lo = 0;
    double hi = 0;
    bool converged = false;
};

// x <- (S + shift I) x with S = m or m^T, sum-normalized.
PowerResult power_iterate(const std::vector<double>& m, std::size_t n, bool transpose,
                          double shift, double tol, bool bracket_stop) {
    PowerResult res;
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
    double prev = -1;
    for (int it = 0; it < kPowerMaxIter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = shift * x[i];
            for (std::size_t j = 0; j < n; ++j)
                s += (transpose ? m[j * n + i] : m[i * n + j]) * x[j];
            y[i] = s;
        }
        double lo = INFINITY, hi = 0, sy = 0, change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sy += y[i];
            if (x[i] > 0) {
                lo = std::min(lo, y[i] / x[i]);
                hi = std::max(hi, y[i] / x[i]);
            }
        }
        if (sy == 0) {
            res.converged = true;
            res.vec = x;
            return res;
        }
        double rq = sy;  // Σx = 1
        for (std::size_t i = 0; i < n; ++i) {
            double xn = y[i] / sy;
            change = std::max(change, std::abs(xn - x[i]));
            x[i] = xn;
        }
        res.lo = lo - shift;
        res.hi = hi - shift;
        res.rho = rq - shift;
        bool done = bracket_stop ? (hi - lo <= tol * hi)
                                 : (prev > 0 && std::abs(rq - prev) <= tol * rq &&
                                    change <= tol * *std::max_element(x.begin(), x.end()));
        prev = rq;
        if (done) {
            res.converged = true;
            res.vec = x;
            if (bracket_stop) res.rho = 0.5 * (lo + hi) - shift;
            return res;
        }
    }
    res.vec = x;
    return res;
}

double residual_left(const std::vector<double>& m, std::size_t n, const std::vector<double>& v,
                     double rho) {
    double r = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i] * m[i * n + j];
        r = std::max(r, std::abs(s - rho * v[j]));
    }
    return r;
}

double residual_right(const std::vector<double>& m, std::size_t n, const std::vector<double>& w,
                      double rho) {
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * w[j];
        r = std::max(r, std::abs(s - rho * w[i]));
    }
    return r;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

ConvergenceError::ConvergenceError(double lo_, double hi_)
    : std::runtime_error("power iteration did not converge; last bracket [" + fmt_double(lo_) +
                         ", " + fmt_double(hi_) + "]"),
      lo(lo_),
      hi(hi_) {}

bool is_irreducible(const CountMatrix& block) {
    auto r = reachability(block);
    for (const auto& row : r)
        for (bool b : row)
            if (!b) return false;
    return true;
}

bool is_primitive(const CountMatrix& block) {
    std::size_t n = block.n;
    if (n == 0) return false;
    std::size_t k = n * n - 2 * n + 2;
    BoolMatrix base = pattern(block);
    BoolMatrix acc;
    bool have = false;
    while (k > 0) {
        if (k & 1) {
            acc = have ? bool_multiply(acc, base) : base;
            have = true;
        }
        k >>= 1;
        if (k) base = bool_multiply(base, base);
    }
    for (const auto& row : acc)
        for (bool b : row)
            if (!b) return false;
    return true;
}

double block_radius(const CountMatrix& block, double tol) {
    if (block.n == 1) return static_cast<double>(block(0, 0));
    bool irreducible = is_irreducible(block);
    if (!irreducible) {
        double r = 0;
        for (const auto& idx : normal_form(block).blocks)
            r = std::max(r, block_radius(principal_submatrix(block, idx), tol));
        return r;
    }
    double shift = is_primitive(block) ? 0.0 : 1.0;
    auto res = power_iterate(to_dense(block), block.n, false, shift, tol, true);
    if (!res.converged) throw ConvergenceError(res.lo, res.hi);
    return res.rho;
}

BlockStructure normal_form(const CountMatrix& m) {
    std::size_t n = m.n;
    auto reach = reachability(m);
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        std::vector<std::size_t> cls;
        for (std::size_t j = i; j < n; ++j)
            if (comp[j] < 0 && reach[i][j] && reach[j][i]) {
                comp[j] = static_cast<int>(classes.size());
                cls.push_back(j);
            }
        classes.push_back(cls);
    }
    std::size_t c = classes.size();
    // succ[X][Y]: some b in X has a letter of Y in its image.
    std::vector<std::vector<bool>> succ(c, std::vector<bool>(c));
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            if (m(a, b) > 0 && comp[a] != comp[b]) succ[comp[b]][comp[a]] = true;

    BlockStructure bs;
    std::vector<bool> placed(c, false);
    for (std::size_t step = 0; step < c; ++step) {
        std::size_t pick = c;
        for (std::size_t x = 0; x < c && pick == c; ++x) {
            if (placed[x]) continue;
            bool ready = true;
            for (std::size_t y = 0; y < c; ++y)
                if (succ[x][y] && !placed[y]) ready = false;
            if (ready) pick = x;  // classes are already ordered by smallest index
        }
        placed[pick] = true;
        bs.blocks.push_back(classes[pick]);
    }
    for (const auto& blk : bs.blocks) {
        bs.permutation.insert(bs.permutation.end(), blk.begin(), blk.end());
        CountMatrix sub = principal_submatrix(m, blk);
        BlockKind kind;
        if (blk.size() == 1 && sub(0, 0) == 0)
            kind = BlockKind::zero;
        else if (is_primitive(sub))
            kind = BlockKind::primitive;
        else
            kind = BlockKind::imprimitive;
        bs.kind.push_back(kind);
        bs.radius.push_back(kind == BlockKind::zero ? 0.0 : block_radius(sub));
    }
    if (bs.blocks.size() >= 2 && bs.kind.back() == BlockKind::primitive) {
        bs.reduced = true;
        bs.b_part = bs.blocks.back();
        for (std::size_t i = 0; i + 1 < bs.blocks.size(); ++i)
            bs.a_part.insert(bs.a_part.end(), bs.blocks[i].begin(), bs.blocks[i].end());
    }
    return bs;
}

double spectral_radius(const CountMatrix& m, double tol) {
    if (m.n == 0) return 0;
    double r = 0;
    for (const auto& blk : normal_form(m).blocks)
        r = std::max(r, block_radius(principal_submatrix(m, blk), tol));
    return r;
}

void normalize(std::vector<double>& v, Normalization norm) {
    double s = 0;
    switch (norm) {
        case Normalization::sum_one: s = std::accumulate(v.begin(), v.end(), 0.0); break;
        case Normalization::first_one: s = v.front(); break;
        case Normalization::min_one: s = *std::min_element(v.begin(), v.end()); break;
    }
    for (auto& x : v) x /= s;
}

PerronData perron_vectors(const CountMatrix& block, Normalization norm, double tol) {
    if (!is_primitive(block)) throw std::invalid_argument("perron_vectors needs a primitive block");
    auto d = to_dense(block);
    std::size_t n = block.n;
    auto right = power_iterate(d, n, false, 0.0, tol, true);
    auto left = power_iterate(d, n, true, 0.0, tol, true);
    if (!right.converged) throw ConvergenceError(right.lo, right.hi);
    if (!left.converged) throw ConvergenceError(left.lo, left.hi);
    PerronData p;
    p.rho = 0.5 * (right.rho + left.rho);
    p.left_vec = left.vec;
    p.right_vec = right.vec;
    p.residual = std::max(residual_left(d, n, p.left_vec, p.rho), residual_right(d, n, p.right_vec, p.rho));
    normalize(p.left_vec, norm);
    normalize(p.right_vec, norm);
    p.normalization = norm;
    return p;
}

std::vector<double> dominant_left_vector(const CountMatrix& m, Normalization norm, double tol,
                                         double* rho_out, double* residual_out) {
    auto d = to_dense(m);
    auto res = power_iterate(d, m.n, true, 1.0, tol, false);
    if (!res.converged) throw ConvergenceError(res.lo, res.hi);
    for (double x : res.vec)
        if (!(x > 0)) throw std::domain_error("dominant left eigenvector is not strictly positive");
    double rho = res.rho;
    if (rho_out) *rho_out = rho;
    if (residual_out) *residual_out = residual_left(d, m.n, res.vec, rho);
    normalize(res.vec, norm);
    return res.vec;
}

ShapeCheck check_shape(const CountMatrix& m, const BlockStructure& bs) {
    ShapeCheck sc;
    if (bs.blocks.size() < 2) {
        sc.failures.push_back("shape: fewer than two diagonal blocks, no C-block");
        return sc;
    }
    if (bs.kind.back() != BlockKind::primitive)
        sc.failures.push_back("shape: final block is not primitive");
    sc.rho_B = bs.radius.back();
    std::size_t na = bs.blocks.size() - 1;
    double ra = 0;
    for (std::size_t i = 0; i < na; ++i) ra = std::max(ra, bs.radius[i]);
    sc.rho_A = ra;
    bool single_radius = true;
    std::ostringstream radii;
    for (std::size_t i = 0; i < na; ++i) {
        if (std::abs(bs.radius[i] - ra) > 1e-9 * ra) single_radius = false;
        radii << (i ? ", " : "") << fmt_double(bs.radius[i]);
    }
    sc.positive_left_eigenvector = single_radius;
    std::vector<std::size_t> a_idx, b_idx = bs.blocks.back();
    for (std::size_t i = 0; i < na; ++i) a_idx.insert(a_idx.end(), bs.blocks[i].begin(), bs.blocks[i].end());
    bool c_nonzero = any_positive(m, a_idx, b_idx);
    if (na != 1) {
        sc.failures.push_back(single_radius
                                  ? "shape: A-part has " + std::to_string(na) + " diagonal blocks"
                                  : "shape: A-part not single-radius (block radii " + radii.str() + ")");
    } else if (bs.kind.front() != BlockKind::primitive) {
        sc.failures.push_back("shape: A-block is not primitive");
    }
    if (!c_nonzero) sc.failures.push_back("shape: C-block is zero");
    sc.shape_ok = sc.failures.empty();

    bool order = true;
    if (!single_radius) {
        sc.failures.push_back("rho_order: A-part diagonal blocks have different spectral radii (" +
                              radii.str() + "); no positive left eigenvector");
        order = false;
    }
    if (!(sc.rho_A > sc.rho_B)) {
        sc.failures.push_back("rho_order: rho(A) = " + fmt_double(sc.rho_A) + " <= rho(B) = " + fmt_double(sc.rho_B));
        order = false;
    }
    if (!(sc.rho_B > 1)) {
        sc.failures.push_back("rho_order: rho(B) = " + fmt_double(sc.rho_B) + " <= 1");
        order = false;
    }
    sc.rho_order_ok = order;
    return sc;
}

namespace {

std::vector<bool> b_mask(const Substitution& sub, const BlockStructure& bs) {
    std::vector<bool> is_b(sub.size(), false);
    for (auto i : bs.b_part) is_b[i] = true;
    return is_b;
}

// One grid inflation step: side s -> side s*q.
Word expand_grid(const Substitution& sub, const Word& grid, std::size_t side) {
    std::size_t q = static_cast<std::size_t>(sub.q), ns = side * q;
    Word out(ns * ns);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
            const Word& img = sub.rules[grid[r * side + c]];
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) out[(r * q + i) * ns + c * q + j] = img[i * q + j];
        }
    return out;
}

}  // namespace

AdmissibilityReport admissibility_report(const Substitution& sub, int tec2_bound) {
    AdmissibilityReport rep;
    CountMatrix m = substitution_matrix(sub);
    BlockStructure bs = normal_form(m);
    rep.shape = check_shape(m, bs);
    rep.failures = rep.shape.failures;
    if (bs.blocks.size() < 2) {
        rep.failures.push_back("tec1: no B-part");
        rep.failures.push_back("tec2: no B-part");
        return rep;
    }
    const auto& bpart = bs.blocks.back();
    auto is_b = b_mask(sub, bs);
    if (!bs.reduced)
        for (auto i : bpart) is_b[i] = true;

    if (sub.dim == 1) {
        rep.border_ok = true;
        for (auto b : bpart) {
            const Word& img = sub.rules[b];
            if (!is_b[img.front()] || !is_b[img.back()]) {
                rep.border_ok = false;
                rep.failures.push_back("tec1: image of '" + sub.alphabet[b] +
                                       "' does not start and end with a B-letter");
            }
        }
        std::vector<Word> cur;
        for (auto b : bpart) cur.push_back(Word{static_cast<Letter>(b)});
        for (int k = 1; k <= tec2_bound && rep.witness_k < 0; ++k) {
            bool all = true, capped = false;
            for (auto& w : cur) {
                std::uint64_t next = 0;
                for (Letter c : w) next += sub.rules[c].size();
                if (next > kDefaultLengthCap) {
                    capped = true;
                    break;
                }
                w = selfsim::apply(sub, w);
                bool interior = false;
                for (std::size_t i = 1; i + 1 < w.size() && !interior; ++i) interior = is_b[w[i]];
                all = all && interior;
            }
            if (capped) break;
            if (all) rep.witness_k = k;
        }
    } else {
        rep.border_ok = true;
        std::size_t q = static_cast<std::size_t>(sub.q);
        for (auto b : bpart) {
            const Word& img = sub.rules[b];
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) {
                    bool boundary = i == 0 || j == 0 || i + 1 == q || j + 1 == q;
                    if (boundary && !is_b[img[i * q + j]]) rep.border_ok = false;
                }
            if (!rep.border_ok) {
                rep.failures.push_back("tec1: grid boundary of '" + sub.alphabet[b] +
                                       "' contains a non-B cell");
                break;
            }
        }
        std::vector<Word> cur;
        for (auto b : bpart) cur.push_back(Word{static_cast<Letter>(b)});
        std::size_t side = 1;
        for (int k = 1; k <= tec2_bound && rep.witness_k < 0; ++k) {
            if (side * q * side * q > kDefaultLengthCap) break;
            bool all = true;
            for (auto& g : cur) {
                g = expand_grid(sub, g, side);
                std::size_t ns = side * q;
                bool interior = false;
                for (std::size_t i = 1; i + 1 < ns && !interior; ++i)
                    for (std::size_t j = 1; j + 1 < ns && !interior; ++j) interior = is_b[g[i * ns + j]];
                all = all && interior;
            }
            side *= q;
            if (all) rep.witness_k = k;
        }
    }
    rep.interior_ok = rep.witness_k > 0;
    if (!rep.interior_ok)
        rep.failures.push_back("tec2: no interior B-letter in σ^k(b) for k <= " + std::to_string(tec2_bound));

    if (rep.shape.shape_ok && rep.shape.rho_order_ok && rep.border_ok && rep.interior_ok) {
        double denom = sub.dim == 1 ? std::log(rep.shape.rho_A) : std::log(static_cast<double>(sub.q));
        rep.alpha = std::log(rep.shape.rho_B) / denom;
    }
    return rep;
}

double alpha_exponent(const Substitution& sub) {
    CountMatrix m = substitution_matrix(sub);
    BlockStructure bs = normal_form(m);
    if (!bs.reduced) throw AdmissibilityError("missing B-part");
    double rho_b = bs.radius.back();
    if (!(rho_b > 1)) throw AdmissibilityError("rho(B) <= 1");
    double ra = 0;
    for (std::size_t i = 0; i + 1 < bs.blocks.size(); ++i) ra = std::max(ra, bs.radius[i]);
    double lambda = sub.dim == 1 ? ra : static_cast<double>(sub.q);
    return std::log(rho_b) / std::log(lambda);
}

std::vector<LengthRatioRow> length_asymptotics_check(const Substitution& sub, int k_max) {
    CountMatrix m = substitution_matrix(sub);
    double rho = 0;
    auto xi = dominant_left_vector(m, Normalization::min_one, kPowerTol, &rho);
    auto L = level_lengths(sub, k_max);
    std::vector<LengthRatioRow> rows;
    for (int k = 0; k <= k_max; ++k) {
        LengthRatioRow row;
        row.k = k;
        for (std::size_t i = 0; i < sub.size(); ++i) {
            if (L[k][i] == kSaturated) throw LengthCapError(kSaturated, kSaturated);
            row.ratio.push_back(static_cast<double>(static_cast<long double>(L[k][i]) /
                                                    (xi[i] * std::pow(static_cast<long double>(rho), k))));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

bool is_matrix_fixture(std::string_view text) {
    auto doc = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
    return doc.is_object() && doc.value("kind", std::string{}) == "matrix";
}

MatrixFixture parse_matrix_fixture(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("syntax error: ") + e.what());
    }
    MatrixFixture fx;
    if (!doc.contains("matrix") || !doc["matrix"].is_array()) throw ConfigError("missing 'matrix'");
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& r : doc["matrix"]) {
        if (!r.is_array()) throw ConfigError("matrix rows must be arrays");
        std::vector<std::uint64_t> row;
        for (const auto& x : r) {
            if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
                throw ConfigError("matrix entries must be nonnegative integers");
            row.push_back(x.get<std::uint64_t>());
        }
        rows.push_back(row);
    }
    try {
        fx.matrix = CountMatrix::from_rows(rows);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (fx.matrix.n == 0) throw ConfigError("empty matrix");
    if (!doc.contains("lambda") || !doc["lambda"].is_number()) throw ConfigError("missing 'lambda'");
    fx.lambda = doc["lambda"].get<double>();
    if (!(fx.lambda > 1)) throw ConfigError("lambda must exceed 1");
    fx.dim = doc.value("dim", 1);
    if (doc.contains("labels")) fx.labels = doc["labels"].get<std::vector<std::string>>();
    if (fx.labels.empty())
        for (std::size_t i = 0; i < fx.matrix.n; ++i) fx.labels.push_back(std::to_string(i));
    if (fx.labels.size() != fx.matrix.n) throw ConfigError("labels do not match matrix size");
    return fx;
}

MatrixReport matrix_report(const MatrixFixture& fx) {
    MatrixReport rep;
    rep.blocks = normal_form(fx.matrix);
    rep.shape = check_shape(fx.matrix, rep.blocks);
    rep.lambda = fx.lambda;
    if (rep.shape.rho_A > 0)
        rep.lambda_dim_mismatch = std::abs(std::pow(fx.lambda, fx.dim) - rep.shape.rho_A) / rep.shape.rho_A;
    if (rep.shape.shape_ok && rep.shape.rho_order_ok)
        rep.alpha = std::log(rep.shape.rho_B) / std::log(fx.lambda);
    return rep;
}

}  // namespace selfsim
