#include "flowtube/rtd.hpp"

#include "flowtube/errors.hpp"
#include "flowtube/physchem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace flowtube {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);
const double sqrt_2_over_pi = std::sqrt(2.0 / pi);
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

} // namespace

void SymGaussParams::validate() const {
    if (!(width > 0.0) || !(amplitude > 0.0)) {
        throw InvalidSpecError("SymGaussParams: width and amplitude must be > 0");
    }
}

void AsymGaussParams::validate() const {
    if (!(width > 0.0) || !(amplitude > 0.0)) {
        throw InvalidSpecError("AsymGaussParams: width and amplitude must be > 0");
    }
}

// -------------------------------------------------------------
// Model evaluation
// -------------------------------------------------------------

double eval_sym_gaussian(const SymGaussParams& p, double t) {
    const double z = (t - p.mean) / p.width;
    return p.amplitude * inv_sqrt_2pi / p.width * std::exp(-0.5 * z * z) + p.baseline;
}

double eval_asym_gaussian(const AsymGaussParams& p, double t) {
    const double z = (t - p.position) / p.width;
    const double skew = 1.0 + std::erf(p.skewness * z / std::numbers::sqrt2);
    return p.amplitude * inv_sqrt_2pi / p.width * std::exp(-0.5 * z * z) * skew + p.baseline;
}

double asym_mean(const AsymGaussParams& p) {
    const double b = p.skewness;
    return p.position + p.width * b * sqrt_2_over_pi / std::sqrt(1.0 + b * b);
}

double asym_mode(const AsymGaussParams& p) {
    if (p.skewness == 0.0) return p.position;

    AsymGaussParams shape = p;
    shape.baseline = 0.0;
    const auto f = [&](double t) { return eval_asym_gaussian(shape, t); };

    // Coarse grid over +-4 sigma, then golden-section refinement of the best cell.
    constexpr int cells = 1600;
    const double lo = p.position - 4.0 * p.width;
    const double h = 8.0 * p.width / cells;
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i <= cells; ++i) {
        const double v = f(lo + i * h);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double a = lo + std::max(best - 1, 0) * h;
    double b = lo + std::min(best + 1, cells) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-12 * p.width) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double eval_laminar_rtd(double tau, double t) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidSpecError("eval_laminar_rtd: tau must be > 0");
    if (t < 0.5 * tau) return 0.0;
    const double t2 = t * t;
    return tau * tau * tau / (2.0 * t2 * t2);
}

// -------------------------------------------------------------
// Internal curves with analytic gradients
// -------------------------------------------------------------

namespace rtd_detail {

double sym_curve(std::span<const double> p, double t, std::span<double> grad) {
    const double alpha = p[0];
    const double sigma = std::exp(p[2]);
    const double z = (t - p[1]) / sigma;
    const double g = std::exp(-0.5 * z * z) * inv_sqrt_2pi / sigma;
    const double peak = alpha * g;
    grad[0] = g;
    grad[1] = peak * z / sigma;
    grad[2] = peak * (z * z - 1.0);
    grad[3] = 1.0;
    return peak + p[3];
}

double asym_curve(std::span<const double> p, double t, std::span<double> grad) {
    const double alpha = p[0];
    const double sigma = std::exp(p[2]);
    const double beta = p[3];
    const double z = (t - p[1]) / sigma;
    const double g = std::exp(-0.5 * z * z) * inv_sqrt_2pi / sigma;
    const double skew = 1.0 + std::erf(beta * z / std::numbers::sqrt2);
    const double skew_core = sqrt_2_over_pi * std::exp(-0.5 * beta * beta * z * z);
    const double value = alpha * g * skew;
    // d value / d z at fixed sigma
    const double dz = alpha * g * (-z * skew + beta * skew_core);
    grad[0] = g * skew;
    grad[1] = -dz / sigma;
    grad[2] = -value - dz * z;
    grad[3] = alpha * g * skew_core * z;
    grad[4] = 1.0;
    return value + p[4];
}

} // namespace rtd_detail

double RtdFit::position() const {
    return std::visit(
        [](const auto& p) {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, SymGaussParams>) {
                return p.mean;
            } else {
                return p.position;
            }
        },
        params);
}

double RtdFit::width() const {
    return std::visit([](const auto& p) { return p.width; }, params);
}

// -------------------------------------------------------------
// Fitting
// -------------------------------------------------------------

namespace {

struct Moments {
    double baseline;
    double area;
    double mean;
    double stddev;
    double skewness;
};

Moments initial_moments(const TimeSeries& trace, double baseline_fraction) {
    const auto t = trace.times();
    const auto y = trace.signal();
    const std::size_t n = t.size();

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*hi - *lo <= 0.0) {
        throw DegenerateInputError("fit_rtd: constant signal, nothing to fit");
    }

    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(baseline_fraction * static_cast<double>(n))));
    std::vector<double> edge;
    edge.reserve(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        edge.push_back(y[i]);
        edge.push_back(y[n - 1 - i]);
    }
    Moments m{};
    m.baseline = median(std::move(edge));

    double w_sum = 0.0;
    double wt_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(y[i] - m.baseline, 0.0);
        w_sum += w;
        wt_sum += w * t[i];
    }
    if (!(w_sum > 0.0)) {
        throw DegenerateInputError("fit_rtd: no signal above the baseline estimate");
    }
    m.mean = wt_sum / w_sum;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(y[i] - m.baseline, 0.0);
        var += w * (t[i] - m.mean) * (t[i] - m.mean);
    }
    m.stddev = std::sqrt(var / w_sum);
    double third = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(y[i] - m.baseline, 0.0);
        third += w * std::pow(t[i] - m.mean, 3);
    }
    m.skewness = m.stddev > 0.0 ? third / w_sum / std::pow(m.stddev, 3) : 0.0;
    if (!(m.stddev > 0.0)) {
        // single-sample peak: fall back to the sampling interval
        m.stddev = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    }
    for (std::size_t i = 1; i < n; ++i) {
        m.area += 0.5 * (y[i] + y[i - 1] - 2.0 * m.baseline) * (t[i] - t[i - 1]);
    }
    if (!(m.area > 0.0)) m.area = w_sum * (t[n - 1] - t[0]) / static_cast<double>(n);
    return m;
}

// Skew-normal start matched to the sample mean, deviation and skewness.
std::vector<double> skew_normal_start(const Moments& m) {
    constexpr double pi = std::numbers::pi;
    const double g = std::clamp(std::abs(m.skewness), 0.0, 0.99);
    const double r = std::cbrt(2.0 * g / (4.0 - pi));
    const double mu_z = r / std::sqrt(1.0 + r * r);  // delta sqrt(2/pi)
    const double delta = std::copysign(std::min(mu_z * std::sqrt(pi / 2.0), 0.995), m.skewness);
    const double omega = m.stddev / std::sqrt(1.0 - 2.0 * delta * delta / pi);
    const double beta = delta / std::sqrt(1.0 - delta * delta);
    const double xi = m.mean - omega * delta * std::sqrt(2.0 / pi);
    return {m.area, xi, std::log(omega), beta, m.baseline};
}

} // namespace

RtdFit fit_rtd(const TimeSeries& trace, RtdModel model, const RtdFitOptions& options) {
    if (model == RtdModel::asymmetric && trace.size() < 5) {
        throw InvalidSpecError("fit_rtd: the asymmetric model needs at least 5 samples");
    }
    const Moments m = initial_moments(trace, options.baseline_fraction);

    RtdFit fit;
    fit.points = trace.size();
    lsq::Result res;
    if (model == RtdModel::symmetric) {
        std::vector<double> p0{m.area, m.mean, std::log(m.stddev), m.baseline};
        res = lsq::fit_curve(trace.times(), trace.signal(), rtd_detail::sym_curve, p0,
                             std::vector<bool>(4, true), options.solver);
        const auto& p = res.params;
        fit.params = SymGaussParams{p[0], p[1], std::exp(p[2]), p[3]};
        fit.uncertainty = {res.sigma(0), res.sigma(1), std::exp(p[2]) * res.sigma(2), nan,
                           res.sigma(3)};
    } else {
        // A start near beta = 0 can settle on the symmetric branch, so two
        // starts are tried and the lower residual kept.
        const std::vector<std::vector<double>> starts{
            skew_normal_start(m), {m.area, m.mean, std::log(m.stddev), 1.0, m.baseline}};
        bool first = true;
        for (const auto& p0 : starts) {
            auto r = lsq::fit_curve(trace.times(), trace.signal(), rtd_detail::asym_curve, p0,
                                    std::vector<bool>(5, true), options.solver);
            const bool better = r.converged && std::isfinite(r.ssr) &&
                                (!res.converged || !(res.ssr <= r.ssr));
            if (first || better) res = std::move(r);
            first = false;
        }
        const auto& p = res.params;
        fit.params = AsymGaussParams{p[0], p[1], std::exp(p[2]), p[3], p[4]};
        fit.uncertainty = {res.sigma(0), res.sigma(1), std::exp(p[2]) * res.sigma(2),
                           res.sigma(3), res.sigma(4)};
    }
    fit.residual_norm = res.ssr;
    fit.iterations = res.iterations;
    fit.message = res.message;
    fit.ssr_gradient.assign(res.ssr_gradient.data(),
                            res.ssr_gradient.data() + res.ssr_gradient.size());
    fit.converged = res.converged && std::isfinite(res.ssr) && fit.width() > 0.0 &&
                    std::visit([](const auto& p) { return p.amplitude > 0.0; }, fit.params);
    if (res.converged && !fit.converged) fit.message = "converged outside parameter invariants";
    return fit;
}

std::vector<RtdFit> fit_rtd_batch(std::span<const TimeSeries> traces, RtdModel model,
                                  const RtdFitOptions& options) {
    std::vector<RtdFit> out(traces.size());
    const auto n = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fit_rtd(traces[static_cast<std::size_t>(i)], model, options);
        } catch (const std::exception& e) {
            RtdFit failed;
            failed.converged = false;
            failed.message = e.what();
            out[static_cast<std::size_t>(i)] = std::move(failed);
        }
    }
    return out;
}

double regression_through_origin(std::span<const std::pair<double, double>> pairs) {
    if (pairs.empty()) {
        throw InvalidSpecError("regression_through_origin: no (tau, mu) pairs");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& [tau, mu] : pairs) {
        if (!(tau > 0.0)) {
            throw InvalidSpecError("regression_through_origin: expected tau must be > 0");
        }
        num += tau * mu;
        den += tau * tau;
    }
    return num / den;
}

} // namespace flowtube
