#include "selfsim/ergodic.hpp"

#include "selfsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selfsim {

TransverseWeights transverse_weights(const CountMatrix& m, const std::vector<std::size_t>& b_letters,
                                     const LengthVector& xi_len) {
    CountMatrix B = principal_submatrix(m, b_letters);
    PerronData p = perron_vectors(B, Normalization::sum_one);
    TransverseWeights tr;
    tr.xi_tr = p.right_vec;
    tr.residual = p.residual;
    double s = 0;
    for (std::size_t i = 0; i < b_letters.size(); ++i) s += xi_len.xi[b_letters[i]] * tr.xi_tr[i];
    for (auto& v : tr.xi_tr) v /= s;
    return tr;
}

MeasureNormalization measure_normalization(const std::vector<double>& xi_len_b, const TransverseWeights& tr,
                                           const std::vector<double>& h_raw) {
    if (h_raw.size() != tr.xi_tr.size() || xi_len_b.size() != tr.xi_tr.size())
        throw std::invalid_argument("vector sizes differ");
    double s = 0, check = 0;
    for (std::size_t i = 0; i < h_raw.size(); ++i) {
        s += tr.xi_tr[i] * h_raw[i];
        check += xi_len_b[i] * tr.xi_tr[i];
    }
    if (!(s > 0) || !(check > 0)) throw std::domain_error("degenerate normalization vectors");
    MeasureNormalization n;
    n.nu = tr.xi_tr;
    n.gamma = 1 / s;
    for (double v : h_raw) n.h.push_back(v / s);
    n.c0 = std::accumulate(n.h.begin(), n.h.end(), 0.0);
    return n;
}

Observable indicator(std::size_t letters, Letter a) {
    Observable f;
    f.weights.assign(letters, 0.0);
    f.weights[a] = 1.0;
    return f;
}

void validate_observable(const Observable& f, const std::vector<bool>& is_b) {
    if (f.weights.size() != is_b.size()) throw std::invalid_argument("observable has the wrong number of weights");
    for (std::size_t a = 0; a < is_b.size(); ++a) {
        if (!std::isfinite(f.weights[a])) throw std::invalid_argument("observable weight is not finite");
        if (!is_b[a] && f.weights[a] != 0 && !f.formal)
            throw std::invalid_argument("observable puts weight on an A-letter; enable formal mode to allow it");
    }
}

double integral_nu(const Observable& f, const std::vector<std::size_t>& b_letters, const std::vector<double>& nu) {
    double s = 0;
    for (std::size_t i = 0; i < b_letters.size(); ++i) s += f.weights[b_letters[i]] * nu[i];
    return s;
}

std::vector<double> birkhoff_prefix_sums(const Word& x, const Observable& f, std::size_t n) {
    if (x.size() < n) throw std::invalid_argument("word shorter than n");
    std::vector<double> p(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) p[k + 1] = p[k] + f(x[k]);
    return p;
}

std::vector<RatioRow> ratio_check(const Word& x, const Observable& f, const Observable& g,
                                  const std::vector<std::uint64_t>& n_grid, double target) {
    std::uint64_t n = n_grid.empty() ? 0 : *std::max_element(n_grid.begin(), n_grid.end());
    auto pf = birkhoff_prefix_sums(x, f, n), pg = birkhoff_prefix_sums(x, g, n);
    std::vector<RatioRow> rows;
    bool any = false;
    for (auto k : n_grid) {
        RatioRow r{k, pf[k], pg[k], pg[k] != 0 ? pf[k] / pg[k] : NAN, target};
        any = any || pg[k] != 0;
        rows.push_back(r);
    }
    if (!any) throw std::domain_error("S_n g vanishes on the whole grid");
    return rows;
}

std::vector<std::uint64_t> report_grid(std::uint64_t n, double ratio) {
    std::vector<std::uint64_t> g;
    for (double v = 2; v < static_cast<double>(n); v *= ratio) {
        auto k = static_cast<std::uint64_t>(std::llround(v));
        if (g.empty() || k > g.back()) g.push_back(k);
    }
    if (n >= 2 && (g.empty() || g.back() < n)) g.push_back(n);
    while (!g.empty() && g.back() > n) g.pop_back();
    return g;
}

ScaleWeights make_scale_weights(double power, std::size_t n) {
    ScaleWeights s;
    s.power = power;
    s.w.resize(n + 1);
    s.w[0] = 0;
    for (std::size_t k = 1; k <= n; ++k) s.w[k] = std::pow(static_cast<double>(k), -power);
    return s;
}

namespace {

template <class Series>
void finish_decade(Series& s, std::uint64_t n) {
    double lo = static_cast<double>(n) / 10;
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        if (s.grid[i] >= lo) {
            mn = std::min(mn, s.partials[i]);
            mx = std::max(mx, s.partials[i]);
        }
    s.oscillation = s.grid.empty() ? 0.0 : mx - mn;
    s.final_partial = s.partials.empty() ? 0.0 : s.partials.back();
}

}  // namespace

SecondOrderSeries second_order_symbolic(const Word& x, const Observable& f, double alpha, double c,
                                        std::uint64_t n_max, double target, const ScaleWeights& kw, double ratio) {
    if (x.size() < n_max) throw std::invalid_argument("orbit shorter than n_max");
    if (kw.w.size() <= n_max || kw.power != alpha + 1) throw std::invalid_argument("scale weights do not match");
    if (!(c > 0)) throw std::invalid_argument("c must be positive");
    SecondOrderSeries s;
    s.alpha = alpha;
    s.c_used = c;
    s.target = target;
    auto grid = report_grid(n_max, ratio);
    std::uint64_t n0 = n_max / 10;
    double S = 0, T = 0, T0 = 0;
    std::size_t gi = 0;
    for (std::uint64_t k = 1; k <= n_max; ++k) {
        S += f(x[k - 1]);
        T += S * kw.w[k];
        if (k == n0) T0 = T;
        if (gi < grid.size() && grid[gi] == k) {
            s.grid.push_back(static_cast<double>(k));
            s.partials.push_back(T / (c * std::log(static_cast<double>(k))));
            ++gi;
        }
    }
    if (n0 >= 1) s.window = (T - T0) / (c * std::log(static_cast<double>(n_max) / static_cast<double>(n0)));
    finish_decade(s, n_max);
    return s;
}

SecondOrderSeries second_order_symbolic(const Word& x, const Observable& f, double alpha, double c,
                                        std::uint64_t n_max, double target, double ratio) {
    return second_order_symbolic(x, f, alpha, c, n_max, target, make_scale_weights(alpha + 1, n_max), ratio);
}

FrequencySeries alpha_frequency(const Word& x, Letter b, double alpha, std::uint64_t n_max, double target,
                                const ScaleWeights& kw, double ratio) {
    if (x.size() < n_max + 1) throw std::invalid_argument("orbit shorter than n_max + 1");
    if (kw.w.size() <= n_max || kw.power != alpha) throw std::invalid_argument("scale weights do not match");
    FrequencySeries s;
    s.target = target;
    auto grid = report_grid(n_max, ratio);
    std::uint64_t n0 = n_max / 10;
    double F = 0, F0 = 0;
    std::size_t gi = 0;
    for (std::uint64_t k = 1; k <= n_max; ++k) {
        if (x[k] == b) F += kw.w[k];
        if (k == n0) F0 = F;
        if (gi < grid.size() && grid[gi] == k) {
            s.grid.push_back(static_cast<double>(k));
            s.partials.push_back(F / std::log(static_cast<double>(k)));
            ++gi;
        }
    }
    if (n0 >= 1) s.window = (F - F0) / std::log(static_cast<double>(n_max) / static_cast<double>(n0));
    finish_decade(s, n_max);
    return s;
}

FrequencySeries alpha_frequency(const Word& x, Letter b, double alpha, std::uint64_t n_max, double target,
                                double ratio) {
    return alpha_frequency(x, b, alpha, n_max, target, make_scale_weights(alpha, n_max), ratio);
}

FrequencySeries log_frequency(const Word& x, Letter a, std::uint64_t n_max, double target, double ratio) {
    return alpha_frequency(x, a, 1.0, n_max, target, make_scale_weights(1.0, n_max), ratio);
}

double frequency_by_parts(const std::vector<double>& prefix, double alpha, std::uint64_t n) {
    if (prefix.size() < n + 2) throw std::invalid_argument("prefix sums too short");
    double F = prefix[n + 1] * std::pow(static_cast<double>(n), -alpha) - prefix[1];
    for (std::uint64_t k = 2; k <= n; ++k)
        F += prefix[k] * (std::pow(static_cast<double>(k - 1), -alpha) - std::pow(static_cast<double>(k), -alpha));
    return F;
}

namespace {

// ∫_a^b (W_a + F (R - a)) R^{-α-1} dR for 0 < a <= b.
double tile_integral(double a, double b, double Wa, double F, double alpha) {
    if (b <= a) return 0;
    double first = (Wa - F * a) * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
    double second = std::abs(alpha - 1) < 1e-15 ? F * std::log(b / a)
                                                : F * (std::pow(b, 1 - alpha) - std::pow(a, 1 - alpha)) / (1 - alpha);
    return first + second;
}

}  // namespace

SecondOrderSeries second_order_tiling_1d(const Tiling1DWindow& win, const LengthVector& xi, const Observable& f,
                                         double alpha, double c, double R_max, double target, double ratio) {
    double reach = win.right(win.last_index());
    if (R_max > reach)
        throw CoverageError("window reaches R = " + std::to_string(reach) + " < R_max = " + std::to_string(R_max), reach);
    SecondOrderSeries s;
    s.alpha = alpha;
    s.c_used = c;
    s.target = target;
    std::vector<double> grid;
    for (double r = ratio; r < R_max; r *= ratio) grid.push_back(r);
    grid.push_back(R_max);
    double W = 0, I = 0, I0 = 0;
    double r0 = R_max / 10;
    bool have0 = false;
    std::size_t gi = 0;
    for (std::int64_t i = 0; i <= win.last_index() && gi < grid.size(); ++i) {
        double a = i == 0 ? 0.0 : win.left(i), b = win.right(i);
        double F = f(win.at(i)) / xi.xi[win.at(i)];
        // integrate the part of [a, b] above R = 1, stopping at report points
        double lo = std::max(a, 1.0);
        auto W_at = [&](double R) { return W + F * (R - a); };
        auto advance = [&](double hi) {
            if (hi > lo) {
                I += tile_integral(lo, hi, W_at(lo), F, alpha);
                lo = hi;
            }
        };
        while (gi < grid.size() && grid[gi] <= b) {
            if (!have0 && r0 >= 1 && r0 <= grid[gi]) {
                advance(std::max(r0, lo));
                I0 = I;
                have0 = true;
            }
            advance(grid[gi]);
            s.grid.push_back(grid[gi]);
            s.partials.push_back(I / (c * std::log(grid[gi])));
            ++gi;
        }
        if (!have0 && r0 >= 1 && r0 <= b) {
            advance(std::max(r0, lo));
            I0 = I;
            have0 = true;
        }
        advance(b);
        W += F * (b - a);
    }
    if (have0) s.window = (I - I0) / (c * std::log(10.0));
    s.final_partial = s.partials.empty() ? 0.0 : s.partials.back();
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        if (s.grid[i] >= r0) {
            mn = std::min(mn, s.partials[i]);
            mx = std::max(mx, s.partials[i]);
        }
    s.oscillation = mx >= mn ? mx - mn : 0.0;
    return s;
}

OrbitSampler make_orbit_sampler(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                const std::vector<double>& top_weights, double rho_A, std::uint64_t n) {
    OrbitSampler s;
    s.sub = &sub;
    s.b_letters = b_letters;
    s.top_weights = top_weights;
    s.n = n;
    s.vertex_of.assign(sub.size(), -1);
    for (std::size_t v = 0; v < b_letters.size(); ++v) s.vertex_of[b_letters[v]] = static_cast<int>(v);
    double need = 1000.0 * static_cast<double>(std::max<std::uint64_t>(n, 1));
    s.depth = std::max(1, static_cast<int>(std::ceil(std::log(need) / std::log(rho_A) - 1e-9)));
    s.lengths = level_lengths(sub, s.depth);
    for (auto b : b_letters)
        if (s.lengths[static_cast<std::size_t>(s.depth)][b] == kSaturated) throw LengthCapError(kSaturated, kSaturated);
    s.b_counts.assign(static_cast<std::size_t>(s.depth) + 1, std::vector<double>(sub.size(), 0.0));
    for (auto b : b_letters) s.b_counts[0][b] = 1;
    for (int m = 1; m <= s.depth; ++m)
        for (std::size_t a = 0; a < sub.size(); ++a)
            for (Letter c : sub.rules[a]) s.b_counts[static_cast<std::size_t>(m)][a] += s.b_counts[static_cast<std::size_t>(m) - 1][c];
    return s;
}

namespace {

std::size_t pick_weighted(const std::vector<double>& w, double u) {
    double tot = std::accumulate(w.begin(), w.end(), 0.0), acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] / tot;
        if (u < acc) return i;
    }
    return w.size() - 1;
}

}  // namespace

Word sample_orbit(const OrbitSampler& s, Stream& rng) {
    const Substitution& sub = *s.sub;
    auto N = static_cast<std::size_t>(s.depth);
    for (;;) {
        Letter top = static_cast<Letter>(s.b_letters[pick_weighted(s.top_weights, rng.uniform())]);
        Letter a = top;
        std::uint64_t pos = 0;
        for (std::size_t m = N; m >= 1; --m) {
            const Word& img = sub.rules[a];
            double u = rng.uniform() * s.b_counts[m][a];
            std::size_t chosen = img.size();
            std::uint64_t before = 0, chosen_before = 0;
            for (std::size_t i = 0; i < img.size(); ++i) {
                double cnt = s.b_counts[m - 1][img[i]];
                if (cnt > 0) {
                    chosen = i;
                    chosen_before = before;
                    if (u < cnt) break;
                    u -= cnt;
                }
                before += s.lengths[m - 1][img[i]];
            }
            pos += chosen_before;
            a = img[chosen];
        }
        if (pos + s.n + 1 <= s.lengths[N][top]) return extract(sub, s.lengths, top, s.depth, pos, s.n + 1);
    }
}

OriginSampler make_origin_sampler(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                  const std::vector<double>& top_weights, int level) {
    OriginSampler s;
    s.sub = &sub;
    s.b_letters = b_letters;
    s.top_weights = top_weights;
    s.level = level;
    s.b_counts.assign(static_cast<std::size_t>(level) + 1, std::vector<double>(sub.size(), 0.0));
    for (auto b : b_letters) s.b_counts[0][b] = 1;
    for (int m = 1; m <= level; ++m)
        for (std::size_t a = 0; a < sub.size(); ++a)
            for (Letter c : sub.rules[a]) s.b_counts[static_cast<std::size_t>(m)][a] += s.b_counts[static_cast<std::size_t>(m) - 1][c];
    return s;
}

Supertile2D sample_origin(const OriginSampler& s, Stream& rng) {
    const Substitution& sub = *s.sub;
    auto q = static_cast<std::size_t>(sub.q);
    Supertile2D t;
    t.level = s.level;
    t.top = static_cast<Letter>(s.b_letters[pick_weighted(s.top_weights, rng.uniform())]);
    Letter a = t.top;
    std::int64_t scale = 1;
    for (int m = 1; m < s.level; ++m) scale *= static_cast<std::int64_t>(q);
    for (auto m = static_cast<std::size_t>(s.level); m >= 1; --m) {
        const Word& img = sub.rules[a];
        double u = rng.uniform() * s.b_counts[m][a];
        std::size_t chosen = img.size();
        for (std::size_t i = 0; i < img.size(); ++i) {
            double cnt = s.b_counts[m - 1][img[i]];
            if (cnt > 0) {
                chosen = i;
                if (u < cnt) break;
                u -= cnt;
            }
        }
        t.oi += static_cast<std::int64_t>(chosen / q) * scale;
        t.oj += static_cast<std::int64_t>(chosen % q) * scale;
        a = img[chosen];
        scale /= static_cast<std::int64_t>(q);
    }
    return t;
}

SecondOrderSeries log_average(const std::vector<double>& radii, const std::vector<double>& values, int refine,
                              double target) {
    SecondOrderSeries s;
    s.target = target;
    std::size_t M = radii.size() - 1;
    double R_max = radii.back(), r0 = R_max / 10;
    double I = 0, I0 = 0, l0 = 0;
    bool have0 = false;
    for (std::size_t i = 1; i <= M; ++i) {
        I += 0.5 * (values[i] + values[i - 1]) * (std::log(radii[i]) - std::log(radii[i - 1]));
        if (!have0 && radii[i] >= r0 * (1 - 1e-12)) {
            I0 = I;
            l0 = std::log(radii[i]);
            have0 = true;
        }
        if (i % static_cast<std::size_t>(refine) == 0 || i == M) {
            s.grid.push_back(radii[i]);
            s.partials.push_back(I / std::log(radii[i]));
        }
    }
    if (have0 && std::log(R_max) > l0) s.window = (I - I0) / (std::log(R_max) - l0);
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        if (s.grid[i] >= r0 * (1 - 1e-12)) {
            mn = std::min(mn, s.partials[i]);
            mx = std::max(mx, s.partials[i]);
        }
    s.oscillation = mx >= mn ? mx - mn : 0.0;
    s.final_partial = s.partials.empty() ? 0.0 : s.partials.back();
    return s;
}

namespace {

std::vector<double> fine_log_grid(double R_max, double report_ratio, int refine) {
    auto M = static_cast<std::size_t>(std::ceil(refine * std::log(R_max) / std::log(report_ratio) - 1e-9));
    M = std::max<std::size_t>(M, 1);
    std::vector<double> r(M + 1);
    double lr = std::log(R_max);
    for (std::size_t i = 0; i <= M; ++i) r[i] = std::exp(lr * static_cast<double>(i) / static_cast<double>(M));
    r[M] = R_max;
    return r;
}

}  // namespace

Tiling2DResult second_order_tiling_2d(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                      const std::vector<double>& top_weights, const std::vector<double>& weights,
                                      double alpha, double c, double target, const Tiling2DOptions& opt) {
    if (sub.dim != 2) throw std::invalid_argument("second_order_tiling_2d needs a 2-D substitution");
    if (!(opt.R_max > 1)) throw std::invalid_argument("R_max must exceed 1");
    int level = static_cast<int>(std::ceil(std::log(opt.R_max) / std::log(static_cast<double>(sub.q)) - 1e-9)) +
                opt.extra_levels;
    auto table = level_weights(sub, weights, level);
    OriginSampler os = make_origin_sampler(sub, b_letters, top_weights, level);
    auto radii = fine_log_grid(opt.R_max, opt.report_ratio, opt.refine);

    struct PerOrigin {
        SecondOrderSeries series;
        int rejected = 0;
    };
    auto per = parallel_map<PerOrigin>(static_cast<std::size_t>(opt.origins), opt.threads, [&](std::size_t idx) {
        Stream rng(opt.seed, StreamTag::origin2d, idx);
        PerOrigin out;
        Supertile2D tile = sample_origin(os, rng);
        while (!disk_inside_supertile(sub, tile, opt.R_max)) {
            ++out.rejected;
            tile = sample_origin(os, rng);
        }
        std::vector<double> vals(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i)
            vals[i] = weighted_ball_count(sub, table, tile, radii[i]) / (c * std::pow(2 * radii[i], alpha));
        out.series = log_average(radii, vals, opt.refine, target);
        return out;
    });

    Tiling2DResult res;
    SecondOrderSeries& m = res.series;
    m.alpha = alpha;
    m.c_used = c;
    m.target = target;
    m.grid = per.front().series.grid;
    m.partials.assign(m.grid.size(), 0.0);
    double n = static_cast<double>(per.size());
    for (const auto& p : per) {
        for (std::size_t i = 0; i < m.grid.size(); ++i) m.partials[i] += p.series.partials[i] / n;
        m.window += p.series.window / n;
        res.final_per_origin.push_back(p.series.final_partial);
        res.rejected += p.rejected;
    }
    m.final_partial = m.partials.back();
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < m.grid.size(); ++i)
        if (m.grid[i] >= opt.R_max / 10 * (1 - 1e-12)) {
            mn = std::min(mn, m.partials[i]);
            mx = std::max(mx, m.partials[i]);
        }
    m.oscillation = mx - mn;
    double ss = 0;
    for (double v : res.final_per_origin) ss += (v - m.final_partial) * (v - m.final_partial);
    res.stderr_final = per.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    return res;
}

SecondOrderSeries second_order_patch(const GridPatch& patch, const std::vector<bool>& is_b,
                                     const std::vector<double>& weights, double alpha, double c, double R_max,
                                     double target, double report_ratio, int refine) {
    double half = std::min(patch.rows, patch.cols) / 2.0;
    if (R_max > half) throw CoverageError("patch covers radius " + std::to_string(half) + " only", half);
    std::vector<std::pair<double, double>> cells;
    for (std::size_t i = 0; i < patch.rows; ++i)
        for (std::size_t j = 0; j < patch.cols; ++j) {
            Letter a = patch.at(i, j);
            if (!is_b[a] || weights[a] == 0) continue;
            double x0 = static_cast<double>(j) - static_cast<double>(patch.cols) / 2;
            double y0 = static_cast<double>(patch.rows) / 2 - static_cast<double>(i) - 1;
            double fx = std::max(std::abs(x0), std::abs(x0 + 1)), fy = std::max(std::abs(y0), std::abs(y0 + 1));
            double d = std::sqrt(fx * fx + fy * fy);
            if (d <= R_max) cells.emplace_back(d, weights[a]);
        }
    std::sort(cells.begin(), cells.end());
    auto radii = fine_log_grid(R_max, report_ratio, refine);
    std::vector<double> vals(radii.size());
    double acc = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        while (k < cells.size() && cells[k].first <= radii[i]) acc += cells[k++].second;
        vals[i] = acc / (c * std::pow(2 * radii[i], alpha));
    }
    SecondOrderSeries s = log_average(radii, vals, refine, target);
    s.alpha = alpha;
    s.c_used = c;
    return s;
}

double ks_uniform(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size()), d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = std::clamp(samples[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

std::vector<DistributionLevel> distribution_experiment(const Substitution& sub, const std::vector<std::size_t>& b_letters,
                                                       const std::vector<double>& top_weights, double rho_A,
                                                       double rho_B, const Observable& f, int n_levels,
                                                       std::size_t samples, std::uint64_t seed, int threads) {
    std::vector<DistributionLevel> out;
    for (int lvl = 0; lvl <= n_levels; ++lvl) {
        DistributionLevel d;
        d.level = lvl;
        d.prefix = static_cast<std::uint64_t>(std::llround(std::pow(rho_A, lvl)));
        OrbitSampler os = make_orbit_sampler(sub, b_letters, top_weights, rho_A, d.prefix);
        double scale = std::pow(rho_B, -lvl);
        auto vals = parallel_map<double>(samples, threads, [&](std::size_t i) {
            Stream rng(seed, StreamTag::distribution, (static_cast<std::uint64_t>(lvl) << 32) + i);
            Word x = sample_orbit(os, rng);
            double S = 0;
            for (std::uint64_t k = 0; k < d.prefix; ++k) S += f(x[k]);
            return S * scale;
        });
        d.mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
        d.ks_distance = ks_uniform(vals);
        std::sort(vals.begin(), vals.end());
        for (int p = 1; p <= 9; ++p) {
            auto idx = static_cast<std::size_t>(std::ceil(p / 10.0 * static_cast<double>(vals.size()))) - 1;
            d.quantiles.push_back(vals[std::min(idx, vals.size() - 1)]);
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace selfsim
