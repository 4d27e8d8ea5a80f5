// Serial reference vs OpenMP for the three hot loops.

#include "flowtube/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace flowtube::kernels;

namespace {

// A synthetic spectrum axis with `lines` peaks spread over it.
struct SpectrumCase {
    std::vector<double> x;
    std::vector<GaussianLine> lines;
};

SpectrumCase spectrum_case(std::size_t points, std::size_t lines) {
    SpectrumCase c;
    c.x.resize(points);
    for (std::size_t i = 0; i < points; ++i) c.x[i] = 10.0 + 190.0 * static_cast<double>(i) / static_cast<double>(points);
    for (std::size_t k = 0; k < lines; ++k) {
        const double m = 15.0 + 180.0 * static_cast<double>(k) / static_cast<double>(lines);
        c.lines.push_back({m, m / 7000.0 / 2.3548, 1.0 + static_cast<double>(k % 7)});
    }
    return c;
}

template <auto Fn>
void bm_gaussians(benchmark::State& state) {
    const auto c = spectrum_case(static_cast<std::size_t>(state.range(0)), 400);
    std::vector<double> out(c.x.size());
    for (auto _ : state) {
        std::fill(out.begin(), out.end(), 0.0);
        Fn(c.x, c.lines, out, 10.0);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bm_convolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> u(n / 20, 1.0);
    std::vector<double> kernel(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n) * 10.0;
        kernel[i] = std::exp(-0.5 * (t - 5.0) * (t - 5.0));
    }
    for (auto _ : state) {
        auto y = Fn(u, kernel, 1e-3);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bm_enumerate(benchmark::State& state) {
    const ElementBounds bounds{static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)), 10, 4};
    for (auto _ : state) {
        auto f = Fn(bounds);
        benchmark::DoNotOptimize(f.data());
    }
}

} // namespace

BENCHMARK(bm_gaussians<add_gaussians_serial>)->Name("gaussians/serial")->Arg(100000)->Arg(1000000);
BENCHMARK(bm_gaussians<add_gaussians_omp>)->Name("gaussians/omp")->Arg(100000)->Arg(1000000)->UseRealTime();
BENCHMARK(bm_convolve<convolve_serial>)->Name("convolve/serial")->Arg(20000)->Arg(100000);
BENCHMARK(bm_convolve<convolve_omp>)->Name("convolve/omp")->Arg(20000)->Arg(100000)->UseRealTime();
BENCHMARK(bm_enumerate<enumerate_formulas_serial>)->Name("enumerate/serial")->Arg(20)->Arg(40);
BENCHMARK(bm_enumerate<enumerate_formulas_omp>)->Name("enumerate/omp")->Arg(20)->Arg(40)->UseRealTime();

BENCHMARK_MAIN();
