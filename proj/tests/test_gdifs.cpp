#include "support.hpp"

#include "selfsim/gdifs.hpp"
#include "selfsim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace selfsim;
using testing_support::fixture;

namespace {

// Cantor function on [-1/2, 1/2] from ternary digits.
double cantor_cdf(double x) {
    long double y = static_cast<long double>(x) + 0.5L;
    if (y <= 0) return 0;
    if (y >= 1) return 1;
    long double acc = 0, w = 0.5L;
    for (int i = 0; i < 60; ++i) {
        y *= 3;
        int d = static_cast<int>(y);
        if (d > 2) d = 2;
        y -= d;
        if (d == 1) return static_cast<double>(acc + w);
        if (d == 2) acc += w;
        w /= 2;
    }
    return static_cast<double>(acc);
}

double cantor_measure(double a, double b) { return cantor_cdf(b) - cantor_cdf(a); }

void extensions(const GdifsGraph& g, std::vector<std::size_t>& path, int depth,
                const std::function<void(const std::vector<std::size_t>&)>& fn) {
    fn(path);
    if (static_cast<int>(path.size()) == depth) return;
    std::vector<std::size_t> next;
    if (path.empty())
        for (std::size_t e = 0; e < g.edges.size(); ++e) next.push_back(e);
    else
        next = g.out[g.edges[path.back()].dst];
    for (auto e : next) {
        path.push_back(e);
        extensions(g, path, depth, fn);
        path.pop_back();
    }
}

}  // namespace

TEST_SUITE("gdifs") {

TEST_CASE("graph construction") {
    auto c = analyze(fixture("cantor"));
    REQUIRE(c.graph.vertex_count() == 1);
    REQUIRE(c.graph.edges.size() == 2);
    CHECK(c.graph.edges[0].u[0] == -1);
    CHECK(c.graph.edges[1].u[0] == 1);
    CHECK(c.graph.lattice);
    CHECK_FALSE(c.graph.overlap);
    CHECK(c.graph.extent[0] == 0.5);

    auto d = analyze(fixture("cantor1001"));
    REQUIRE(d.graph.edges.size() == 2);
    CHECK(d.graph.edges[0].u[0] == doctest::Approx(-2).epsilon(1e-10));
    CHECK(d.graph.edges[1].u[0] == doctest::Approx(2).epsilon(1e-10));

    auto g = analyze(fixture("carpet"));
    CHECK(g.graph.dim == 2);
    CHECK(g.graph.edges.size() == 8);
    for (const auto& e : g.graph.edges) CHECK_FALSE((e.u[0] == 0 && e.u[1] == 0));
}

TEST_CASE("maps send supports into supports") {
    for (const char* name : {"cantor", "cantor1001", "sigma2", "sigma_k0", "sigma_k3", "carpet"}) {
        auto a = analyze(fixture(name));
        const auto& g = a.graph;
        for (const auto& e : g.edges)
            for (int k = 0; k < g.dim; ++k) {
                double lo = (-g.extent[e.dst] + e.u[k]) / g.lambda;
                double hi = (g.extent[e.dst] + e.u[k]) / g.lambda;
                CHECK(lo >= -g.extent[e.src] - 1e-9);
                CHECK(hi <= g.extent[e.src] + 1e-9);
            }
        CHECK(dimension(g) == doctest::Approx(a.alpha).epsilon(1e-12));
        CHECK(std::pow(g.lambda, a.alpha) == doctest::Approx(g.rho).epsilon(1e-12));
    }
}

TEST_CASE("natural projection") {
    auto c = analyze(fixture("cantor"));
    std::vector<std::size_t> left(60, 0), right(60, 1);
    CHECK(natural_projection(c.graph, left).point[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(natural_projection(c.graph, right).point[0] == doctest::Approx(0.5).epsilon(1e-15));
    auto p = natural_projection(c.graph, right, 3);
    CHECK(std::abs(p.point[0] - 0.5) <= p.error_bound + 1e-15);

    auto g = analyze(fixture("carpet"));
    std::size_t corner = 0;
    for (std::size_t e = 0; e < g.graph.edges.size(); ++e)
        if (g.graph.edges[e].u[0] == 1 && g.graph.edges[e].u[1] == 1) corner = e;
    auto q = natural_projection(g.graph, std::vector<std::size_t>(40, corner));
    CHECK(q.point[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q.point[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(composable(g.graph, {0, 1, 2}));
}

TEST_CASE("cylinder masses are self-similar") {
    for (const char* name : {"cantor", "cantor1001", "carpet"}) {
        auto a = analyze(fixture(name));
        std::vector<std::size_t> path;
        int depth = a.graph.dim == 2 ? 4 : 6;
        extensions(a.graph, path, depth, [&](const std::vector<std::size_t>& p) {
            if (p.empty() || static_cast<int>(p.size()) == depth) return;
            double sum = 0;
            for (auto e : a.graph.out[a.graph.edges[p.back()].dst]) {
                auto q = p;
                q.push_back(e);
                sum += cylinder_measure(a.graph, a.mass, q);
            }
            CHECK(sum == cylinder_measure(a.graph, a.mass, p));
        });
    }
    auto c = analyze(fixture("cantor"));
    CHECK(cylinder_measure(c.graph, c.mass, {0, 1, 1}) == 0.125);
    CHECK(cylinder_mass(c.graph, c.mass, {0}) == 0.5);
}

TEST_CASE("sampler probabilities and frequencies") {
    auto c = analyze(fixture("cantor1001"));
    auto s = make_sampler(c.graph, c.mass, 3);
    CHECK(max_outgoing_defect(s) <= 1e-12);
    for (double p : s.prob) CHECK(p == doctest::Approx(0.5));

    auto g = analyze(fixture("carpet"));
    auto sg = make_sampler(g.graph, g.mass, 4);
    const int n = 20000;
    std::map<std::vector<std::size_t>, int> counts;
    for (int i = 0; i < n; ++i) {
        auto p = sample_path(sg, static_cast<std::uint64_t>(i), 2);
        counts[p]++;
    }
    CHECK(counts.size() == 64);
    for (const auto& [path, k] : counts) {
        double p = cylinder_measure(g.graph, g.mass, path);
        double se = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(static_cast<double>(k) / n - p) <= 4 * se);
    }
    CHECK(sample_path(sg, 5, 10) == sample_path(sg, 5, 10));
}

TEST_CASE("ball bracket against the Cantor function") {
    auto c = analyze(fixture("cantor"));
    for (int m = 1; m <= 8; ++m) {
        double r = std::pow(3.0, -m);
        auto b = ball_measure_bracket(c.graph, c.mass, 0, {-0.5, 0}, r, m + 12);
        CHECK(b.lower <= std::ldexp(1.0, -m) + 1e-15);
        CHECK(b.upper >= std::ldexp(1.0, -m) - 1e-15);
        CHECK(b.upper - b.lower <= 1e-3 * std::ldexp(1.0, -m));
    }
    Stream rng(9, StreamTag::test, 20);
    for (int t = 0; t < 1000; ++t) {
        double x = rng.uniform() - 0.5;
        double r = std::pow(3.0, -6 * rng.uniform());
        auto shape = static_cast<BallShape>(rng.below(3));
        double lo = shape == BallShape::right ? x : x - r;
        double hi = shape == BallShape::left ? x : x + r;
        double want = cantor_measure(lo, hi);
        double prev_lo = -1, prev_hi = 2;
        for (int d = 0; d <= 14; d += 2) {
            auto b = ball_measure_bracket(c.graph, c.mass, 0, {x, 0}, r, d, shape);
            CHECK(b.lower <= b.upper);
            CHECK(b.lower <= want + 1e-12);
            CHECK(b.upper >= want - 1e-12);
            CHECK(b.lower >= prev_lo - 1e-15);
            CHECK(b.upper <= prev_hi + 1e-15);
            prev_lo = b.lower;
            prev_hi = b.upper;
        }
    }
    auto whole = ball_measure_bracket(c.graph, c.mass, 0, {0, 0}, 1.0, 3);
    CHECK(whole.lower == doctest::Approx(1));
    CHECK(whole.upper == doctest::Approx(1));
    CHECK_THROWS(ball_measure_bracket(c.graph, c.mass, 0, {0, 0}, 1.0, 65));
}

TEST_CASE("carpet bracket soundness and monotonicity") {
    auto g = analyze(fixture("carpet"));
    Stream rng(10, StreamTag::test, 21);
    for (int t = 0; t < 300; ++t) {
        Vec2 x{rng.uniform() - 0.5, rng.uniform() - 0.5};
        double r = std::pow(3.0, -3 * rng.uniform());
        double prev_lo = -1, prev_hi = 2;
        for (int d = 0; d <= 4; ++d) {
            auto b = ball_measure_bracket(g.graph, g.mass, 0, x, r, d);
            CHECK(b.lower <= b.upper);
            CHECK(b.lower >= prev_lo - 1e-15);
            CHECK(b.upper <= prev_hi + 1e-15);
            prev_lo = b.lower;
            prev_hi = b.upper;
        }
    }
}

TEST_CASE("relative bracket agrees with the absolute one") {
    for (const char* name : {"cantor", "cantor1001", "carpet"}) {
        auto a = analyze(fixture(name));
        auto s = make_sampler(a.graph, a.mass, 1);
        auto opt = default_bracket_options(a.graph.dim);
        for (std::uint64_t i = 0; i < 20; ++i) {
            PathFrame frame(a.graph, sample_path(s, i, 80));
            for (double t : {0.0, 0.5, 1.25, 2.0, 3.7}) {
                auto rel = relative_bracket(a.graph, a.mass, frame, t, BallShape::symmetric, opt);
                int depth = a.graph.dim == 2 ? 5 : 14;
                auto abs = ball_measure_bracket(a.graph, a.mass, frame.start_vertex(), frame.point(),
                                                std::pow(a.graph.lambda, -t), depth);
                CHECK(rel.lower <= rel.upper);
                CHECK(rel.lower <= abs.upper + 1e-9);
                CHECK(abs.lower <= rel.upper + 1e-9);
            }
        }
    }
}

TEST_CASE("zoom frontier keeps every cell meeting the ball") {
    auto a = analyze(fixture("carpet"));
    auto s = make_sampler(a.graph, a.mass, 2);
    auto opt = default_bracket_options(2);
    for (std::uint64_t i = 0; i < 10; ++i) {
        PathFrame frame(a.graph, sample_path(s, i, 60));
        std::vector<RelCell> frontier{{{0, 0}, frame.start_vertex()}};
        for (std::size_t j = 0; j < 4; ++j) {
            frontier = zoom_frontier(a.graph, frame, frontier, j);
            double t = static_cast<double>(j + 1) + 0.3;
            auto fromz = relative_bracket(a.graph, a.mass, frame, frontier, static_cast<int>(j + 1), t,
                                          BallShape::symmetric, opt);
            auto root = relative_bracket(a.graph, a.mass, frame, t, BallShape::symmetric, opt);
            CHECK(fromz.lower == doctest::Approx(root.lower).epsilon(1e-9));
            CHECK(fromz.upper == doctest::Approx(root.upper).epsilon(1e-9));
        }
    }
}

TEST_CASE("density estimator properties") {
    auto c = analyze(fixture("cantor"));
    auto opt = default_density_options(c.graph);
    opt.k = 16;
    opt.replicas = 24;
    opt.side = BallShape::right;

    SUBCASE("deterministic for a fixed seed") {
        auto a = average_density(c.graph, c.mass, c.alpha, opt);
        auto b = average_density(c.graph, c.mass, c.alpha, opt);
        CHECK(a.per_replica == b.per_replica);
        CHECK(a.c_hat == b.c_hat);
    }
    SUBCASE("linear in the mass vector") {
        auto a = average_density(c.graph, c.mass, c.alpha, opt);
        MassVector twice = c.mass;
        for (auto& h : twice.h) h *= 2;
        auto b = average_density(c.graph, twice, c.alpha, opt);
        CHECK(b.c_hat == 2 * a.c_hat);
    }
    SUBCASE("direct and transported one-sided forms agree statistically") {
        auto t = average_density(c.graph, c.mass, c.alpha, opt);
        auto d = opt;
        d.transport = false;
        auto u = average_density(c.graph, c.mass, c.alpha, d);
        double se = std::hypot(t.stderr_, u.stderr_);
        CHECK(std::abs(t.c_hat - u.c_hat) <= 3 * se + t.systematic_bound + u.systematic_bound);
    }
    SUBCASE("pointwise and Birkhoff agree statistically") {
        auto p = average_density(c.graph, c.mass, c.alpha, opt);
        auto b = opt;
        b.method = DensityMethod::birkhoff;
        auto q = average_density(c.graph, c.mass, c.alpha, b);
        double se = std::hypot(p.stderr_, q.stderr_);
        CHECK(std::abs(p.c_hat - q.c_hat) <= 3 * se + p.systematic_bound + q.systematic_bound);
        CHECK(p.c_hat > 0);
    }
    SUBCASE("unattainable precision raises") {
        auto bad = opt;
        bad.bracket.e_min = 0;
        bad.bracket.e_max = 0;
        bad.max_systematic = 1e-9;
        CHECK_THROWS_AS(average_density(c.graph, c.mass, c.alpha, bad), PrecisionError);
    }
}

TEST_CASE("point cloud lies on the attractor hull") {
    auto g = analyze(fixture("carpet"));
    auto s = make_sampler(g.graph, g.mass, 7);
    auto pts = point_cloud(s, 500, 20);
    CHECK(pts.size() == 500);
    for (const auto& p : pts) {
        CHECK(std::abs(p[0]) <= 0.5 + 1e-12);
        CHECK(std::abs(p[1]) <= 0.5 + 1e-12);
        // The central ninth is empty.
        CHECK_FALSE((std::abs(p[0]) < 1.0 / 6 - 1e-9 && std::abs(p[1]) < 1.0 / 6 - 1e-9));
    }
}

}  // TEST_SUITE
