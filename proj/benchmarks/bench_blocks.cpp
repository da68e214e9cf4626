#include <benchmark/benchmark.h>

#include "pfsc/blocks.hpp"
#include "pfsc/data_io.hpp"
#include "pfsc/solver.hpp"

using namespace pfsc;

namespace {

MultiViewDataset blobs(std::size_t per_cluster) {
    numerics::Rng rng(1);
    return io::synth_blobs(per_cluster, 3, {{5, 0.1, true}, {8, 0.1, true}}, 10.0, rng);
}

void BM_UpdateS(benchmark::State& state) {
    const auto data = blobs(static_cast<std::size_t>(state.range(0)));
    blocks::ViewCache cache(data.view(0).data, 1.0);
    numerics::Rng rng(2);
    const Matrix F = numerics::random_orthonormal(static_cast<Eigen::Index>(data.n()), 3, rng);
    for (auto _ : state) benchmark::DoNotOptimize(blocks::update_s(cache, F, 1.0));
}
BENCHMARK(BM_UpdateS)->Arg(50)->Arg(100)->Arg(200);

void BM_UpdateF(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(3 * state.range(0));
    numerics::Rng rng(3);
    const std::vector<Matrix> F{numerics::random_orthonormal(n, 3, rng), numerics::random_orthonormal(n, 3, rng)};
    const Matrix Y = numerics::random_orthonormal(n, 3, rng);
    const Matrix G = rng.gaussian_matrix(n, n).cwiseAbs();
    const Matrix L = blocks::build_laplacian(G);
    const Vector w = Vector::Constant(2, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(blocks::update_f(L, w, 0, Y, F, 1.0, MVariant::paper));
}
BENCHMARK(BM_UpdateF)->Arg(50)->Arg(100)->Arg(200);

void BM_Fit(benchmark::State& state) {
    const auto data = blobs(static_cast<std::size_t>(state.range(0)));
    HyperParams p;
    p.c = 3;
    p.max_outer_iters = 10;
    p.rel_obj_tol = 1e-300;
    for (auto _ : state) benchmark::DoNotOptimize(solver::fit(data, p));
}
BENCHMARK(BM_Fit)->Arg(50)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
