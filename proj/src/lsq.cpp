#include "flowtube/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowtube::lsq {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double max_damping = 1e16;

struct Workspace {
    std::span<const double> t;
    std::span<const double> y;
    const CurveFn& f;
    std::vector<std::size_t> free_index;
    std::vector<double> full;
    std::vector<double> grad;

    // Residuals r = f - y and Jacobian over the free parameters.
    double evaluate(Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        const auto n = static_cast<Eigen::Index>(t.size());
        r.resize(n);
        if (jac) jac->resize(n, static_cast<Eigen::Index>(free_index.size()));
        double ssr = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::fill(grad.begin(), grad.end(), 0.0);
            const double v = f(full, t[i], grad);
            r[i] = v - y[i];
            ssr += r[i] * r[i];
            if (jac) {
                for (std::size_t k = 0; k < free_index.size(); ++k) {
                    (*jac)(i, static_cast<Eigen::Index>(k)) = grad[free_index[k]];
                }
            }
        }
        return std::isfinite(ssr) ? ssr : std::numeric_limits<double>::infinity();
    }

    void set_free(const Eigen::VectorXd& p) {
        for (std::size_t k = 0; k < free_index.size(); ++k) {
            full[free_index[k]] = p[static_cast<Eigen::Index>(k)];
        }
    }

    Eigen::VectorXd get_free() const {
        Eigen::VectorXd p(static_cast<Eigen::Index>(free_index.size()));
        for (std::size_t k = 0; k < free_index.size(); ++k) {
            p[static_cast<Eigen::Index>(k)] = full[free_index[k]];
        }
        return p;
    }
};

// 1 / column norm, with dead columns left at unit scale.
Eigen::VectorXd column_scale(const Eigen::MatrixXd& jac) {
    Eigen::VectorXd s(jac.cols());
    double max_norm = 0.0;
    for (Eigen::Index k = 0; k < jac.cols(); ++k) max_norm = std::max(max_norm, jac.col(k).norm());
    for (Eigen::Index k = 0; k < jac.cols(); ++k) {
        const double c = jac.col(k).norm();
        s[k] = c > 1e-300 && c > 1e-30 * max_norm ? 1.0 / c : (max_norm > 0.0 ? 1.0 / max_norm : 1.0);
    }
    return s;
}

} // namespace

std::size_t Result::free_count() const {
    return static_cast<std::size_t>(std::count(free.begin(), free.end(), true));
}

double Result::sigma(std::size_t i) const {
    if (i >= free.size() || !free[i] || !covariance_valid) return nan;
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < i; ++j) {
        if (free[j]) ++k;
    }
    const double v = covariance(k, k);
    return v >= 0.0 ? std::sqrt(v) : nan;
}

double sum_squared_residuals(std::span<const double> t, std::span<const double> y,
                             const CurveFn& f, std::span<const double> params) {
    std::vector<double> grad(params.size());
    double ssr = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = f(params, t[i], grad) - y[i];
        ssr += r * r;
    }
    return ssr;
}

double aicc(double ssr, std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    const double floor = std::numeric_limits<double>::min();
    double score = nn * std::log(std::max(ssr, floor) / nn) + 2.0 * kk;
    if (n > k + 1) {
        score += 2.0 * kk * (kk + 1.0) / (nn - kk - 1.0);
    } else {
        score = std::numeric_limits<double>::infinity();
    }
    return score;
}

Result fit_curve(std::span<const double> t, std::span<const double> y, const CurveFn& f,
                 std::vector<double> p0, std::vector<bool> free, const Options& opt) {
    Result res;
    res.free = free;

    Workspace ws{t, y, f, {}, std::move(p0), {}};
    ws.grad.assign(ws.full.size(), 0.0);
    for (std::size_t i = 0; i < free.size(); ++i) {
        if (free[i]) ws.free_index.push_back(i);
    }
    const auto n_free = static_cast<Eigen::Index>(ws.free_index.size());

    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    const double exact_floor = opt.exact_fit_fraction * std::max(y2, std::numeric_limits<double>::min());

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double ssr = ws.evaluate(r, &jac);

    if (n_free == 0) {
        res.params = ws.full;
        res.ssr = ssr;
        res.converged = std::isfinite(ssr);
        res.message = "no free parameters";
        return res;
    }

    Eigen::VectorXd p = ws.get_free();
    double lambda = opt.initial_damping;
    int small_steps = 0;
    bool done = false;
    int iter = 0;

    if (!std::isfinite(ssr)) {
        res.message = "initial residual not finite";
    } else if (ssr <= exact_floor) {
        done = true;
        res.converged = true;
        res.message = "exact fit";
    }

    Eigen::VectorXd r_new;
    while (!done && iter < opt.max_iterations) {
        ++iter;
        // Column scaling keeps the damped solve well conditioned when the
        // parameters differ by many orders of magnitude.
        const Eigen::VectorXd scale = column_scale(jac);
        const Eigen::MatrixXd js = jac * scale.asDiagonal();

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a(js.rows() + n_free, n_free);
            a.topRows(js.rows()) = js;
            a.bottomRows(n_free) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(n_free, n_free);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(js.rows() + n_free);
            b.head(js.rows()) = -r;
            const Eigen::VectorXd step = scale.asDiagonal() * a.colPivHouseholderQr().solve(b);
            const Eigen::VectorXd p_try = p + step;
            ws.set_free(p_try);
            const double ssr_try = step.allFinite() ? ws.evaluate(r_new, nullptr)
                                                    : std::numeric_limits<double>::infinity();
            if (ssr_try < ssr) {
                const double rel = (ssr - ssr_try) / ssr;
                p = p_try;
                ssr = ssr_try;
                ws.evaluate(r, &jac);
                lambda = std::max(lambda / opt.damping_decrease, 1e-12);
                accepted = true;
                small_steps = rel < opt.relative_ssr_tolerance ? small_steps + 1 : 0;
                if (ssr <= exact_floor) {
                    res.converged = true;
                    res.message = "exact fit";
                    done = true;
                } else if (small_steps >= 2) {
                    res.converged = true;
                    res.message = "relative SSR change below tolerance";
                    done = true;
                }
            } else {
                ws.set_free(p);
                lambda *= opt.damping_increase;
                if (lambda > max_damping) {
                    // No direction decreases SSR: stationary to working precision.
                    res.converged = true;
                    res.message = "stationary point (damping saturated)";
                    done = true;
                    break;
                }
            }
        }
    }
    if (!done) res.message = "iteration limit reached";

    ws.set_free(p);
    res.params = ws.full;
    res.ssr = ssr;
    res.iterations = iter;

    ws.evaluate(r, &jac);
    res.ssr_gradient = 2.0 * jac.transpose() * r;

    const auto n = static_cast<Eigen::Index>(t.size());
    if (n > n_free) {
        const Eigen::VectorXd scale = column_scale(jac);
        const Eigen::MatrixXd js = jac * scale.asDiagonal();
        const Eigen::MatrixXd jtj = js.transpose() * js;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
        const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
        const double emin = eig.eigenvalues().minCoeff();
        if (eig.info() == Eigen::Success && emin > 1e-14 * emax && emax > 0.0) {
            const double s2 = ssr / static_cast<double>(n - n_free);
            const Eigen::MatrixXd inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                                        eig.eigenvectors().transpose();
            if (opt.covariance == Covariance::classical) {
                res.covariance = s2 * (scale.asDiagonal() * inv * scale.asDiagonal());
            } else if (opt.covariance == Covariance::proportional) {
                const Eigen::ArrayXd fit = (Eigen::Map<const Eigen::VectorXd>(y.data(), n) + r).array();
                const Eigen::ArrayXd rel = (fit.abs() > 0.0).select(r.array() / fit, 0.0);
                const double s2rel = rel.square().sum() / static_cast<double>(n - n_free);
                const Eigen::VectorXd w = s2rel * fit.square();
                const Eigen::MatrixXd meat = js.transpose() * w.asDiagonal() * js;
                res.covariance = scale.asDiagonal() * (inv * meat * inv) * scale.asDiagonal();
            } else {
                // leverage h_i = j_i (J^T J)^-1 j_i^T, in scaled columns
                const Eigen::MatrixXd ji = js * inv;
                const Eigen::VectorXd h = (ji.array() * js.array()).rowwise().sum();
                const Eigen::VectorXd w =
                    (r.array() / (1.0 - h.array().min(1.0 - 1e-12))).square();
                const Eigen::MatrixXd meat = js.transpose() * w.asDiagonal() * js;
                res.covariance = scale.asDiagonal() * (inv * meat * inv) * scale.asDiagonal();
            }
            res.covariance_valid = true;
        }
    }
    if (!res.covariance_valid) {
        res.covariance = Eigen::MatrixXd::Constant(n_free, n_free, nan);
    }
    if (!std::isfinite(res.ssr)) res.converged = false;
    return res;
}

} // namespace flowtube::lsq
