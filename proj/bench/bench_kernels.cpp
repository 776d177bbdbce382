// Serial (threads = 1) against OpenMP (threads = 0, all cores) on the hot kernels.
#include "selfsim/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <string>

using namespace selfsim;

namespace {

const Analysis& fixture(const std::string& name) {
    static std::map<std::string, Analysis> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, analyze(load_substitution(std::string(SELFSIM_FIXTURES) + "/" + name + ".json"))).first;
    return it->second;
}

void BM_density(benchmark::State& state, const char* name, DensityMethod method) {
    const auto& a = fixture(name);
    auto o = default_density_options(a.graph);
    o.method = method;
    o.k = 20;
    o.replicas = 16;
    o.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(average_density(a.graph, a.mass, a.alpha, o).c_hat);
}

void BM_disk_count(benchmark::State& state) {
    const auto& a = fixture("carpet");
    static const GridPatch patch = grid_patch(a.sub, default_seed(a.sub, 1), 6);
    int threads = static_cast<int>(state.range(0));
    double R = patch.rows / 2.0;
    for (auto _ : state) benchmark::DoNotOptimize(count_B_tiles_ball_2d(patch, a.is_b, R, threads));
}

void BM_tiling_2d(benchmark::State& state) {
    const auto& a = fixture("carpet");
    Tiling2DOptions o;
    o.R_max = 243;
    o.origins = 16;
    o.threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(second_order_tiling_2d(a.sub, a.b_letters, a.norm.h, a.h_weight_per_letter(), a.alpha,
                                                        0.69, 1.0, o)
                                     .series.final_partial);
}

}  // namespace

BENCHMARK_CAPTURE(BM_density, cantor_pointwise, "cantor", DensityMethod::pointwise)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_density, carpet_birkhoff, "carpet", DensityMethod::birkhoff)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_disk_count)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tiling_2d)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
