#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) for small dense curve fits.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flowtube::lsq {

enum class Covariance {
    // SSR/(n-p) (J^T J)^-1: assumes one noise level for every sample
    classical,
    // HC3 sandwich (J^T J)^-1 J^T diag(r_i^2/(1-h_i)^2) J (J^T J)^-1:
    // holds when the noise level varies with the signal
    robust,
    // sandwich with Var(r_i) = s^2 f_i^2, s^2 = sum (r_i/f_i)^2 / (n-p):
    // noise proportional to the signal
    proportional,
};

struct Options {
    double initial_damping = 1e-3;
    double damping_increase = 10.0;
    double damping_decrease = 10.0;
    int max_iterations = 200;
    double relative_ssr_tolerance = 1e-10;
    // SSR below this fraction of sum(y^2) counts as an exact fit.
    double exact_fit_fraction = 1e-26;
    Covariance covariance = Covariance::robust;
};

/// y(t; p) for the full internal parameter vector; writes dy/dp into `grad`.
using CurveFn = std::function<double(std::span<const double> params, double t, std::span<double> grad)>;

struct Result {
    std::vector<double> params;       // full internal vector (frozen entries untouched)
    std::vector<bool> free;           // mask used for the fit
    double ssr = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    Eigen::MatrixXd covariance;       // over free parameters, internal coordinates
    Eigen::VectorXd ssr_gradient;     // d SSR / d p_free at the solution
    bool covariance_valid = false;

    std::size_t free_count() const;
    /// 1-sigma of internal parameter i, NaN when frozen or unavailable.
    double sigma(std::size_t i) const;
};

/// Fits y ~ f(t; p) over the parameters with free[i] == true. Never throws
/// on non-convergence; inspect Result::converged.
Result fit_curve(std::span<const double> t, std::span<const double> y, const CurveFn& f,
                 std::vector<double> p0, std::vector<bool> free, const Options& opt = {});

/// Sum of squared residuals for a full parameter vector.
double sum_squared_residuals(std::span<const double> t, std::span<const double> y,
                             const CurveFn& f, std::span<const double> params);

/// Small-sample corrected Akaike score from an SSR: n ln(SSR/n) + 2k + 2k(k+1)/(n-k-1).
double aicc(double ssr, std::size_t n, std::size_t k);

} // namespace flowtube::lsq
