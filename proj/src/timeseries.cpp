#include "flowtube/timeseries.hpp"

#include "flowtube/errors.hpp"

#include <cmath>
#include <string>

namespace flowtube {

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> signal)
    : times_(std::move(times)), signal_(std::move(signal)) {
    if (times_.size() != signal_.size()) {
        throw InvalidSpecError("TimeSeries: times and signal lengths differ");
    }
    if (times_.size() < min_points) {
        throw InvalidSpecError("TimeSeries: need at least " + std::to_string(min_points) +
                               " samples, got " + std::to_string(times_.size()));
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !std::isfinite(signal_[i])) {
            throw InvalidSpecError("TimeSeries: non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw InvalidSpecError("TimeSeries: times must be strictly increasing (index " +
                                   std::to_string(i) + ")");
        }
    }
}

double TimeSeries::trapezoid() const {
    double area = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        area += 0.5 * (signal_[i] + signal_[i - 1]) * (times_[i] - times_[i - 1]);
    }
    return area;
}

} // namespace flowtube
