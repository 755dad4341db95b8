// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/kernels.hpp"

using namespace fraclab;

namespace {

struct Fixture {
    Grid grid;
    KernelSet kernel;
    std::vector<double> u;
    std::vector<char> mask;

    explicit Fixture(int cells) {
        grid = build_grid(DomainSpec::interval(-1.0, 1.0, 2.0 / cells));
        kernel = build_kernel(grid, 1.65);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u.push_back(d(rng));
            mask.push_back(u.back() > 0.0);
        }
    }
};

const Fixture& fixture(int cells) {
    static Fixture f256(256), f1024(1024);
    return cells == 256 ? f256 : f1024;
}

template <bool Omp>
void BM_PowerSums(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(0)));
    kernels::set_threads(static_cast<int>(st.range(1)));
    for (auto _ : st) {
        auto r = Omp ? kernels::omp::power_sums(f.kernel, f.u, 1.1) : kernels::serial::power_sums(f.kernel, f.u, 1.1);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Omp>
void BM_Gradient(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(0)));
    kernels::set_threads(static_cast<int>(st.range(1)));
    std::vector<double> g(f.u.size());
    for (auto _ : st) {
        auto r = Omp ? kernels::omp::power_sums_gradient(f.kernel, f.u, 1.1, g)
                     : kernels::serial::power_sums_gradient(f.kernel, f.u, 1.1, g);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Omp>
void BM_CutWeight(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(0)));
    kernels::set_threads(static_cast<int>(st.range(1)));
    for (auto _ : st) {
        double r = Omp ? kernels::omp::cut_weight(f.kernel, f.mask) : kernels::serial::cut_weight(f.kernel, f.mask);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Omp>
void BM_Hessian(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(0)));
    kernels::set_threads(static_cast<int>(st.range(1)));
    std::vector<double> h(f.u.size() * f.u.size());
    for (auto _ : st) {
        if (Omp) kernels::omp::hessian(f.kernel, f.u, 1.1, 1e-10, h);
        else kernels::serial::hessian(f.kernel, f.u, 1.1, 1e-10, h);
        benchmark::DoNotOptimize(h.data());
    }
}

void Args(benchmark::internal::Benchmark* b) {
    for (int cells : {256, 1024})
        for (int t : {1, 2, 4}) b->Args({cells, t});
}

}  // namespace

BENCHMARK(BM_PowerSums<false>)->Apply(Args);
BENCHMARK(BM_PowerSums<true>)->Apply(Args);
BENCHMARK(BM_Gradient<false>)->Apply(Args);
BENCHMARK(BM_Gradient<true>)->Apply(Args);
BENCHMARK(BM_CutWeight<false>)->Apply(Args);
BENCHMARK(BM_CutWeight<true>)->Apply(Args);
BENCHMARK(BM_Hessian<false>)->Apply(Args);
BENCHMARK(BM_Hessian<true>)->Apply(Args);

BENCHMARK_MAIN();
