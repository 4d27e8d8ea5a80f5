#pragma once

// Residence-time-distribution models and their least-squares fitting.

#include "flowtube/lsq.hpp"
#include "flowtube/timeseries.hpp"

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace flowtube {

/// alpha / (sigma sqrt(2 pi)) exp(-(t - mu)^2 / (2 sigma^2)) + baseline
struct SymGaussParams {
    double amplitude = 1.0;  // alpha, signal * s
    double mean = 0.0;       // mu, s
    double width = 1.0;      // sigma, s
    double baseline = 0.0;   // epsilon

    void validate() const;
};

/// Symmetric Gaussian times [1 + erf(beta (t - mu0) / (sigma sqrt 2))] plus baseline.
struct AsymGaussParams {
    double amplitude = 1.0;  // alpha
    double position = 0.0;   // mu0, s
    double width = 1.0;      // sigma, s
    double skewness = 0.0;   // beta
    double baseline = 0.0;   // epsilon

    void validate() const;
};

enum class RtdModel { symmetric, asymmetric };

double eval_sym_gaussian(const SymGaussParams& p, double t);
double eval_asym_gaussian(const AsymGaussParams& p, double t);

/// Mean of the normalized asymmetric profile (baseline ignored).
double asym_mean(const AsymGaussParams& p);

/// Location of the maximum of the asymmetric profile.
double asym_mode(const AsymGaussParams& p);

/// Ideal laminar (Poiseuille, no diffusion) RTD density: tau^3 / (2 t^4) for t >= tau/2.
double eval_laminar_rtd(double tau, double t);

struct RtdUncertainty {
    double amplitude = 0.0;
    double position = 0.0;  // mu or mu0
    double width = 0.0;
    double skewness = 0.0;  // NaN for the symmetric model
    double baseline = 0.0;
};

struct RtdFit {
    std::variant<SymGaussParams, AsymGaussParams> params;
    double residual_norm = 0.0;  // SSR
    RtdUncertainty uncertainty;
    bool converged = false;
    int iterations = 0;
    std::string message;
    std::vector<double> ssr_gradient;  // over internal coordinates (log width)
    std::size_t points = 0;

    RtdModel model() const {
        return std::holds_alternative<SymGaussParams>(params) ? RtdModel::symmetric
                                                              : RtdModel::asymmetric;
    }
    /// mu for symmetric fits, mu0 for asymmetric ones.
    double position() const;
    double width() const;
};

struct RtdFitOptions {
    double baseline_fraction = 0.05;
    lsq::Options solver;
};

/// Throws DegenerateInputError for constant traces; never throws on
/// non-convergence (converged = false instead).
RtdFit fit_rtd(const TimeSeries& trace, RtdModel model, const RtdFitOptions& options = {});

/// Independent fits in input order; OpenMP-parallel across traces.
std::vector<RtdFit> fit_rtd_batch(std::span<const TimeSeries> traces, RtdModel model,
                                  const RtdFitOptions& options = {});

/// Slope of mu = s * tau through the origin: sum(tau mu) / sum(tau^2).
double regression_through_origin(std::span<const std::pair<double, double>> pairs);

namespace rtd_detail {
// Internal parameterisations used by the fitter, exposed for tests:
// symmetric [alpha, mu, ln sigma, eps], asymmetric [alpha, mu0, ln sigma, beta, eps].
double sym_curve(std::span<const double> p, double t, std::span<double> grad);
double asym_curve(std::span<const double> p, double t, std::span<double> grad);
} // namespace rtd_detail

} // namespace flowtube
