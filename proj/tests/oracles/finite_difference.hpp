#pragma once

// Central finite differences of a sum of squared residuals.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using SsrFn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> ssr_gradient(const SsrFn& ssr, const std::vector<double>& p,
                                        const std::vector<bool>& free, double rel_step = 1e-6) {
    std::vector<double> g;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!free[i]) continue;
        const double h = rel_step * std::max(std::abs(p[i]), 1.0);
        std::vector<double> up = p;
        std::vector<double> dn = p;
        up[i] += h;
        dn[i] -= h;
        g.push_back((ssr(up) - ssr(dn)) / (2.0 * h));
    }
    return g;
}

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace oracle
