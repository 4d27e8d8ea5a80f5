#pragma once

// Explicit adaptive Runge-Kutta (Dormand-Prince 5(4)) with PI step control.

#include <functional>
#include <span>
#include <vector>

namespace flowtube::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct Options {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-3;
    double initial_step = 0.0;  // 0 selects a step automatically
    long max_steps = 10'000'000;
};

struct Solution {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // one state per output time
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/// Integrates from t0 and records the state at each output time (sorted,
/// all >= t0). Output times are hit exactly, not interpolated.
Solution integrate(const Rhs& f, double t0, std::vector<double> y0,
                   std::span<const double> output_times, const Options& opt = {});

} // namespace flowtube::ode
