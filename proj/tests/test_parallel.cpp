#include "support.hpp"

#include "selfsim/parallel.hpp"
#include "selfsim/rng.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace selfsim;
using testing_support::fixture;

TEST_SUITE("parallel") {

TEST_CASE("parallel_map is independent of the thread count") {
    auto fn = [](std::size_t i) {
        Stream rng(42, StreamTag::test, i);
        double s = 0;
        for (int k = 0; k < 100; ++k) s += rng.uniform();
        return s;
    };
    auto serial = parallel_map<double>(257, 1, fn);
    for (int t : {2, 3, 8}) CHECK(parallel_map<double>(257, t, fn) == serial);
    CHECK(parallel_map<double>(0, 4, fn).empty());
}

TEST_CASE("exceptions cross the parallel loop") {
    auto fn = [](std::size_t i) -> int {
        if (i == 13) throw std::runtime_error("boom");
        return static_cast<int>(i);
    };
    CHECK_THROWS_AS(parallel_map<int>(40, 4, fn), std::runtime_error);
    CHECK_THROWS_AS(parallel_map<int>(40, 1, fn), std::runtime_error);
}

TEST_CASE("streams") {
    Stream a(1, StreamTag::pointwise, 0), b(1, StreamTag::pointwise, 0), c(1, StreamTag::birkhoff, 0),
        d(1, StreamTag::pointwise, 1);
    auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
    CHECK(a.position() == 1);
    Stream e(9, StreamTag::test, 0);
    for (int i = 0; i < 1000; ++i) {
        double u = e.uniform();
        CHECK(u >= 0);
        CHECK(u < 1);
        CHECK(e.below(7) < 7);
    }
}

TEST_CASE("density estimates are identical across thread counts") {
    for (const char* name : {"cantor", "carpet"}) {
        auto a = analyze(fixture(name));
        auto opt = default_density_options(a.graph);
        opt.k = a.graph.dim == 2 ? 4 : 10;
        opt.replicas = 12;
        opt.side = a.graph.dim == 1 ? BallShape::right : BallShape::symmetric;
        for (auto m : {DensityMethod::pointwise, DensityMethod::birkhoff}) {
            opt.method = m;
            opt.threads = 1;
            auto s = average_density(a.graph, a.mass, a.alpha, opt);
            opt.threads = 4;
            auto p = average_density(a.graph, a.mass, a.alpha, opt);
            CHECK(s.per_replica == p.per_replica);
            CHECK(s.c_hat == p.c_hat);
            CHECK(s.stderr_ == p.stderr_);
        }
    }
}

TEST_CASE("2-D kernels are identical across thread counts") {
    auto a = analyze(fixture("carpet"));
    auto patch = grid_patch(a.sub, default_seed(a.sub, 1), 5);
    for (double R : {10.0, 99.5, 243.0})
        CHECK(count_B_tiles_ball_2d(patch, a.is_b, R, 1) == count_B_tiles_ball_2d(patch, a.is_b, R, 4));

    Tiling2DOptions opt;
    opt.R_max = 81;
    opt.origins = 6;
    opt.threads = 1;
    auto s = second_order_tiling_2d(a.sub, a.b_letters, a.norm.h, a.h_weight_per_letter(), a.alpha, 0.69, 1, opt);
    opt.threads = 3;
    auto p = second_order_tiling_2d(a.sub, a.b_letters, a.norm.h, a.h_weight_per_letter(), a.alpha, 0.69, 1, opt);
    CHECK(s.series.partials == p.series.partials);
    CHECK(s.final_per_origin == p.final_per_origin);
}

TEST_CASE("distribution experiment is identical across thread counts") {
    auto a = analyze(fixture("cantor"));
    auto f = indicator(2, 1);
    auto s = distribution_experiment(a.sub, a.b_letters, a.norm.h, a.rho_A, a.rho_B, f, 4, 64, 3, 1);
    auto p = distribution_experiment(a.sub, a.b_letters, a.norm.h, a.rho_A, a.rho_B, f, 4, 64, 3, 4);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].quantiles == p[i].quantiles);
        CHECK(s[i].mean == p[i].mean);
    }
}

}  // TEST_SUITE
