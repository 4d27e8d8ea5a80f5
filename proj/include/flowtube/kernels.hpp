#pragma once

// Hot loops with a serial reference and an OpenMP version. Both versions
// accumulate in the same order per output element, so results are
// bit-identical; the serial code is kept for tests and benchmarks.

#include <span>
#include <vector>

namespace flowtube::kernels {

struct GaussianLine {
    double center = 0.0;
    double sigma = 1.0;
    double height = 0.0;
};

/// out[i] += sum_k height_k exp(-(x_i - c_k)^2 / (2 s_k^2)), each line
/// truncated at +-cutoff sigma. `x` must be increasing.
void add_gaussians_serial(std::span<const double> x, std::span<const GaussianLine> lines,
                          std::span<double> out, double cutoff = 10.0);
void add_gaussians_omp(std::span<const double> x, std::span<const GaussianLine> lines,
                       std::span<double> out, double cutoff = 10.0);

/// Causal discrete convolution y[i] = h sum_{j<=i} u[j] kernel[i-j] for
/// i < kernel.size(); `u` is typically a short input pulse.
std::vector<double> convolve_serial(std::span<const double> u, std::span<const double> kernel,
                                    double h);
std::vector<double> convolve_omp(std::span<const double> u, std::span<const double> kernel,
                                 double h);

struct ElementBounds {
    int c_max = 20;
    int h_max = 40;
    int o_max = 10;
    int n_max = 4;
};

struct CandidateFormula {
    int c = 0, h = 0, o = 0, n = 0;
    double mass = 0.0;  // singly charged cation mass
};

/// Every non-empty C/H/O/N composition within bounds, in (c, h, o, n)
/// lexicographic order, with its +1 ion mass.
std::vector<CandidateFormula> enumerate_formulas_serial(const ElementBounds& bounds);
std::vector<CandidateFormula> enumerate_formulas_omp(const ElementBounds& bounds);

} // namespace flowtube::kernels
