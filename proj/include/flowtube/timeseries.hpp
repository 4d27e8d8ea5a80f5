#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowtube {

/// Sampled (time, signal) trace. Times strictly increasing, signal finite,
/// at least `min_points` samples.
class TimeSeries {
public:
    static constexpr std::size_t min_points = 4;

    TimeSeries() = default;
    TimeSeries(std::vector<double> times, std::vector<double> signal);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> signal() const noexcept { return signal_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    /// Trapezoidal integral of the signal.
    double trapezoid() const;

private:
    std::vector<double> times_;
    std::vector<double> signal_;
};

} // namespace flowtube
