#include "support.hpp"

#include "selfsim/rng.hpp"
#include "selfsim/tiling.hpp"

#include <doctest.h>

#include <cmath>

using namespace selfsim;
using testing_support::fixture;

namespace {

GridPatch single_cell(Letter a) {
    GridPatch p;
    p.rows = p.cols = 1;
    p.labels = {a};
    return p;
}

// Naive disk count around the centre of cell (oi, oj) of a dense patch.
double dense_disk_weight(const GridPatch& p, const std::vector<double>& w, std::size_t oi, std::size_t oj, double R) {
    double acc = 0;
    for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t j = 0; j < p.cols; ++j) {
            double x0 = static_cast<double>(j) - static_cast<double>(oj) - 0.5;
            double y0 = static_cast<double>(oi) - static_cast<double>(i) - 0.5;
            bool inside = true;
            for (double dx : {x0, x0 + 1})
                for (double dy : {y0, y0 + 1}) inside &= dx * dx + dy * dy <= R * R;
            if (inside) acc += w[p.at(i, j)];
        }
    return acc;
}

}  // namespace

TEST_SUITE("tiling") {

TEST_CASE("suspension lengths") {
    auto c = suspension_lengths(fixture("cantor"));
    CHECK(c.xi[0] == doctest::Approx(1));
    CHECK(c.xi[1] == doctest::Approx(1));
    auto d = suspension_lengths(fixture("cantor1001"));
    CHECK(d.xi[0] == doctest::Approx(1));
    CHECK(d.xi[1] == doctest::Approx(2));
    for (const char* name : {"cantor", "cantor1001", "sigma2", "sigma_k2"}) {
        auto s = fixture(name);
        auto xi = suspension_lengths(s);
        auto m = substitution_matrix(s);
        for (std::size_t v = 0; v < s.size(); ++v) {
            double rhs = 0;
            for (std::size_t w = 0; w < s.size(); ++w) rhs += m(w, v) * xi.xi[w];
            CHECK(xi.rho * xi.xi[v] == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
    auto g = suspension_lengths(fixture("carpet"));
    CHECK(g.xi == std::vector<double>{1, 1});
}

TEST_CASE("tiling length") {
    auto s = fixture("cantor1001");
    auto xi = suspension_lengths(s);
    CHECK(tiling_length(word_from_string(s, "1001"), xi) == doctest::Approx(6));
    CHECK(tiling_length(Word{}, xi) == 0);
    Stream rng(1, StreamTag::test, 30);
    for (int t = 0; t < 500; ++t) {
        Word w(1 + rng.below(40));
        for (auto& c : w) c = static_cast<Letter>(rng.below(2));
        CHECK(tiling_length(selfsim::apply(s, w), xi) == doctest::Approx(xi.rho * tiling_length(w, xi)).epsilon(1e-10));
    }
}

TEST_CASE("windows") {
    auto s = fixture("cantor1001");
    auto xi = suspension_lengths(s);
    auto win = window_from_sequence(Word{0}, word_from_string(s, "10"), xi);
    CHECK(win.first_index == -1);
    CHECK(win.left(0) == doctest::Approx(-1));
    CHECK(win.right(0) == doctest::Approx(1));
    CHECK(win.left(1) == doctest::Approx(1));
    CHECK(win.right(1) == doctest::Approx(2));
    CHECK(win.left(-1) == doctest::Approx(-2));

    auto c = fixture("cantor");
    auto cx = suspension_lengths(c);
    auto o = orbit_generate(c, {0, 1}, 6);
    Word left(o.left.rbegin(), o.left.rend());
    std::reverse(left.begin(), left.end());
    auto w = window_from_sequence(left, o.right, cx);
    CHECK(w.left(0) == doctest::Approx(-0.5));
    for (std::int64_t i = w.first_index; i <= w.last_index(); ++i) CHECK(w.left(i) < w.right(i));

    // Inflating x by σ scales block boundaries by ρ.
    Word x = word_from_string(s, "1001101");
    auto wx = window_from_sequence(Word{}, x, xi);
    auto wy = window_from_sequence(Word{}, selfsim::apply(s, x), xi);
    std::size_t pos = 0;
    double shift = wy.left(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(wy.left(static_cast<std::int64_t>(pos)) - shift ==
              doctest::Approx(xi.rho * (wx.left(static_cast<std::int64_t>(i)) - wx.left(0))).epsilon(1e-10));
        pos += s.rules[x[i]].size();
    }
}

TEST_CASE("B-tile counts against brute force") {
    auto s = fixture("cantor1001");
    auto xi = suspension_lengths(s);
    std::vector<bool> is_b{false, true};
    Word x = iterate(s, 1, 6);
    auto win = window_from_sequence(Word{}, x, xi);
    BTileCounter counter(win, is_b);
    Stream rng(2, StreamTag::test, 31);
    std::uint64_t prev = 0;
    for (int t = 0; t < 300; ++t) {
        double T = counter.reach() * (t + 1) / 301.0;
        std::uint64_t brute = 0;
        for (std::int64_t i = 0; i <= win.last_index(); ++i)
            if (x[static_cast<std::size_t>(i)] == 1 && win.left(i) >= 0 && win.right(i) <= T) ++brute;
        CHECK(count_B_tiles_1d(win, is_b, T) == brute);
        CHECK(counter(T) == brute);
        CHECK(brute >= prev);
        prev = brute;
    }
    CHECK(count_B_tiles_1d(win, is_b, 0.1) == 0);
    CHECK_THROWS_AS(count_B_tiles_1d(win, is_b, counter.reach() + 1), CoverageError);
    try {
        counter(counter.reach() + 1);
    } catch (const CoverageError& e) {
        CHECK(e.max_usable == doctest::Approx(counter.reach()));
    }
}

TEST_CASE("growth scan") {
    auto c = fixture("cantor");
    auto xi = suspension_lengths(c);
    std::vector<bool> is_b{false, true};
    auto zeros = window_from_sequence(Word{}, Word(200, 0), xi);
    for (const auto& r : btile_growth_scan(zeros, is_b, 0.63, geometric_grid(1, 150, 1.5))) CHECK(r.ratio == 0);

    auto win = window_from_sequence(Word{}, iterate(c, 1, 8), xi);
    double alpha = std::log(2.0) / std::log(3.0);
    auto rows = btile_growth_scan(win, is_b, alpha, geometric_grid(1, 6000, 1.1));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].running_max >= rows[i - 1].running_max);
    CHECK(rows.back().running_max < 2);

    auto grid = geometric_grid(1, 100, 2);
    CHECK(grid.front() == 1);
    CHECK(grid.back() == 100);
    CHECK(grid.size() == 8);
}

TEST_CASE("length ratio lemma quantities") {
    auto c = fixture("cantor");
    auto xi = suspension_lengths(c);
    Word x = iterate(c, 1, 5);
    for (const auto& p : lemma_length_ratio(x, xi, {1, 10, 100, 242})) CHECK(p.ratio == doctest::Approx(1));
    auto s = fixture("cantor1001");
    auto x2 = iterate(s, 1, 5);
    auto r = lemma_length_ratio(x2, suspension_lengths(s), {1, 3});
    CHECK(r[0].ratio == doctest::Approx(1));
    CHECK(r[1].ratio == doctest::Approx(4.0 / 3));
    CHECK(R_k(x2, suspension_lengths(s), 0) == doctest::Approx(1));
    CHECK(R_k(x2, suspension_lengths(s), 3) == doctest::Approx(5));
    CHECK_THROWS_AS(lemma_length_ratio(x2, suspension_lengths(s), {x2.size()}), CoverageError);
}

TEST_CASE("grid patches") {
    auto g = fixture("carpet");
    auto seed = default_seed(g, 1);
    auto p0 = grid_patch(g, seed, 0);
    CHECK(p0.labels == seed.labels);
    auto p1 = grid_patch(g, seed, 1);
    CHECK(p1.rows == 6);
    for (std::size_t bi = 0; bi < 2; ++bi)
        for (std::size_t bj = 0; bj < 2; ++bj) CHECK(p1.at(3 * bi + 1, 3 * bj + 1) == 0);
    for (int n = 0; n <= 4; ++n) {
        auto p = grid_patch(g, seed, n);
        CHECK(std::count(p.labels.begin(), p.labels.end(), Letter{1}) == 4 * static_cast<long>(std::pow(8, n)));
    }
    auto twice = grid_patch(g, grid_patch(g, seed, 1), 1);
    auto p2 = grid_patch(g, seed, 2);
    CHECK(twice.labels == p2.labels);
    CHECK(twice.rows == p2.rows);
    CHECK_THROWS_AS(grid_patch(g, seed, 12), LengthCapError);
    CHECK(patch_to_text(g, p0) == "# rows 2 cols 2 level 0\n11\n11\n");
    CHECK(counts_csv({{1.5, 2}}) == "R,N\n1.5,2\n");
}

TEST_CASE("disk counts in 2-D") {
    auto g = fixture("carpet");
    std::vector<bool> is_b{false, true};
    auto p = grid_patch(g, default_seed(g, 1), 6);
    CHECK(count_B_tiles_ball_2d(p, is_b, 0.4) == 0);
    CHECK(count_B_tiles_ball_2d(p, is_b, std::sqrt(2.0)) == 4);

    GridPatch full;
    full.rows = full.cols = 200;
    full.labels.assign(200 * 200, 1);
    const double pi = std::acos(-1.0);
    for (double R : {5.0, 20.5, 77.7}) {
        double n = static_cast<double>(count_B_tiles_ball_2d(full, is_b, R));
        CHECK(n <= pi * R * R);
        CHECK(n >= pi * (R - std::sqrt(2.0)) * (R - std::sqrt(2.0)));
    }
    auto far = btile_far_distances(p, is_b);
    for (double R : {3.0, 17.2, 100.0})
        CHECK(static_cast<std::uint64_t>(std::upper_bound(far.begin(), far.end(), R) - far.begin()) ==
              count_B_tiles_ball_2d(p, is_b, R));
    double a = static_cast<double>(count_B_tiles_ball_2d(p, is_b, 81 * 1.5));
    double b = static_cast<double>(count_B_tiles_ball_2d(p, is_b, 243 * 1.5));
    CHECK(b / a == doctest::Approx(8).epsilon(0.1));
    CHECK_THROWS_AS(count_B_tiles_ball_2d(p, is_b, 1000), CoverageError);
}

TEST_CASE("hierarchical disk weights match the dense patch") {
    auto g = fixture("carpet");
    std::vector<double> w{0.0, 1.0};
    int L = 4;
    auto table = level_weights(g, w, L);
    CHECK(table[L][1] == 4096);
    CHECK(table[L][0] == 0);
    auto dense = grid_patch(g, single_cell(1), L);
    Stream rng(4, StreamTag::test, 32);
    for (int t = 0; t < 60; ++t) {
        std::size_t oi = rng.below(dense.rows), oj = rng.below(dense.cols);
        double R = 40 * rng.uniform();
        Supertile2D tile{1, L, static_cast<std::int64_t>(oi), static_cast<std::int64_t>(oj)};
        CHECK(weighted_ball_count(g, table, tile, R) == dense_disk_weight(dense, w, oi, oj, R));
        bool inside = oi + 0.5 >= R && dense.rows - oi - 0.5 >= R && oj + 0.5 >= R && dense.cols - oj - 0.5 >= R;
        CHECK(disk_inside_supertile(g, tile, R) == inside);
    }
}

}  // TEST_SUITE
