#include "flowtube/ode.hpp"

#include "flowtube/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace flowtube::ode {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b*, the embedded 4th order error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double safety = 0.9;
constexpr double min_factor = 0.2;
constexpr double max_factor = 5.0;
constexpr double alpha = 0.7 / 5.0;
constexpr double beta = 0.4 / 5.0;

} // namespace

Solution integrate(const Rhs& f, double t0, std::vector<double> y0,
                   std::span<const double> output_times, const Options& opt) {
    const std::size_t n = y0.size();
    Solution sol;
    sol.times.assign(output_times.begin(), output_times.end());
    sol.states.reserve(output_times.size());
    if (!std::is_sorted(output_times.begin(), output_times.end()) ||
        (!output_times.empty() && output_times.front() < t0)) {
        throw InvalidSpecError("ode::integrate: output times must be sorted and >= t0");
    }

    std::vector<double> y = std::move(y0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
    double t = t0;

    const auto error_norm = [&](double h) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                    e7 * k7[i]);
            const double scale = opt.absolute_tolerance +
                                 opt.relative_tolerance * std::max(std::abs(y[i]), std::abs(y_new[i]));
            acc += (err / scale) * (err / scale);
        }
        return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
    };

    f(t, y, k1);
    double h = opt.initial_step;
    if (!(h > 0.0)) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.absolute_tolerance + opt.relative_tolerance * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / std::max<double>(1.0, static_cast<double>(n)));
        d1 = std::sqrt(d1 / std::max<double>(1.0, static_cast<double>(n)));
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }

    double err_prev = 1e-4;
    for (double t_out : output_times) {
        while (t < t_out) {
            if (sol.accepted_steps + sol.rejected_steps >= opt.max_steps) {
                throw Error(ErrorCategory::fit, "ode::integrate: step budget exhausted");
            }
            bool last = false;
            const double h_planned = h;
            if (t + h >= t_out) {
                h = t_out - t;
                last = true;
            }

            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
            f(t + c2 * h, tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(t + c3 * h, tmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + c4 * h, tmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + c5 * h, tmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                     a65 * k5[i]);
            f(t + h, tmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(t + h, y_new, k7);

            const double err = error_norm(h);
            if (std::isfinite(err) && err <= 1.0) {
                t = last ? t_out : t + h;
                y.swap(y_new);
                k1.swap(k7);  // first-same-as-last
                ++sol.accepted_steps;
                double factor = err == 0.0 ? max_factor
                                           : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
                factor = std::clamp(factor, min_factor, max_factor);
                err_prev = std::max(err, 1e-4);
                h = last ? std::max(h * factor, h_planned) : h * factor;
            } else {
                ++sol.rejected_steps;
                const double factor = std::isfinite(err)
                                          ? std::max(min_factor, safety * std::pow(err, -alpha))
                                          : min_factor;
                h *= factor;
            }
        }
        sol.states.push_back(y);
    }
    return sol;
}

} // namespace flowtube::ode
