#include "flowtube/kernels.hpp"

#include "flowtube/elements.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace flowtube::kernels {

// ---------------------------------------------------------------------------
// Gaussian superposition
// ---------------------------------------------------------------------------

namespace {

std::size_t lower_index(std::span<const double> x, double v) {
    return static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), v) - x.begin());
}

inline double gauss(const GaussianLine& g, double x) {
    const double z = (x - g.center) / g.sigma;
    return g.height * std::exp(-0.5 * z * z);
}

} // namespace

void add_gaussians_serial(std::span<const double> x, std::span<const GaussianLine> lines,
                          std::span<double> out, double cutoff) {
    // per sample, lines are added in input order
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (const auto& g : lines) {
            if (std::abs(x[i] - g.center) <= cutoff * g.sigma) out[i] += gauss(g, x[i]);
        }
    }
}

void add_gaussians_omp(std::span<const double> x, std::span<const GaussianLine> lines,
                       std::span<double> out, double cutoff) {
    // Each line only touches [lo, hi); sweeping lines in order per sample
    // keeps the summation order of the serial version.
    std::vector<std::size_t> lo(lines.size()), hi(lines.size());
    for (std::size_t k = 0; k < lines.size(); ++k) {
        lo[k] = lower_index(x, lines[k].center - cutoff * lines[k].sigma);
        hi[k] = static_cast<std::size_t>(
            std::upper_bound(x.begin(), x.end(), lines[k].center + cutoff * lines[k].sigma) -
            x.begin());
    }
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    constexpr std::ptrdiff_t block = 4096;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < n; b += block) {
        const auto b0 = static_cast<std::size_t>(b);
        const auto b1 = static_cast<std::size_t>(std::min(n, b + block));
        for (std::size_t k = 0; k < lines.size(); ++k) {
            if (hi[k] <= b0 || lo[k] >= b1) continue;
            const std::size_t i0 = std::max(lo[k], b0);
            const std::size_t i1 = std::min(hi[k], b1);
            for (std::size_t i = i0; i < i1; ++i) {
                if (std::abs(x[i] - lines[k].center) <= cutoff * lines[k].sigma) {
                    out[i] += gauss(lines[k], x[i]);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Convolution
// ---------------------------------------------------------------------------

namespace {

inline double convolve_at(std::span<const double> u, std::span<const double> kernel, double h,
                          std::size_t i) {
    const std::size_t j1 = std::min(i + 1, u.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < j1; ++j) acc += u[j] * kernel[i - j];
    return h * acc;
}

} // namespace

std::vector<double> convolve_serial(std::span<const double> u, std::span<const double> kernel,
                                    double h) {
    std::vector<double> y(kernel.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = convolve_at(u, kernel, h, i);
    return y;
}

std::vector<double> convolve_omp(std::span<const double> u, std::span<const double> kernel,
                                 double h) {
    std::vector<double> y(kernel.size());
    const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = convolve_at(u, kernel, h, static_cast<std::size_t>(i));
    }
    return y;
}

// ---------------------------------------------------------------------------
// Formula enumeration
// ---------------------------------------------------------------------------

namespace {

void enumerate_carbon(int c, const ElementBounds& b, std::vector<CandidateFormula>& out) {
    for (int h = 0; h <= b.h_max; ++h) {
        for (int o = 0; o <= b.o_max; ++o) {
            for (int n = 0; n <= b.n_max; ++n) {
                if (c + h + o + n == 0) continue;
                out.push_back({c, h, o, n, elements::ion_mass(c, h, o, n, 1)});
            }
        }
    }
}

} // namespace

std::vector<CandidateFormula> enumerate_formulas_serial(const ElementBounds& bounds) {
    std::vector<CandidateFormula> out;
    for (int c = 0; c <= bounds.c_max; ++c) enumerate_carbon(c, bounds, out);
    return out;
}

std::vector<CandidateFormula> enumerate_formulas_omp(const ElementBounds& bounds) {
    std::vector<std::vector<CandidateFormula>> parts(static_cast<std::size_t>(bounds.c_max + 1));
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c <= bounds.c_max; ++c) enumerate_carbon(c, bounds, parts[static_cast<std::size_t>(c)]);
    std::vector<CandidateFormula> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

} // namespace flowtube::kernels
