#include "flowtube/kinetics.hpp"

#include "flowtube/errors.hpp"
#include "flowtube/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace flowtube {

std::string_view to_string(KineticKind kind) {
    switch (kind) {
    case KineticKind::reactant: return "reactant";
    case KineticKind::product: return "product";
    case KineticKind::intermediate: return "intermediate";
    }
    return "unknown";
}

// -------------------------------------------------------------
// Model evaluation
// -------------------------------------------------------------

namespace {

void require_kind(const KineticModel& m, KineticKind kind) {
    if (m.kind != kind) {
        throw InvalidSpecError(std::string("kinetic model is a ") + std::string(to_string(m.kind)) +
                               ", expected a " + std::string(to_string(kind)));
    }
}

} // namespace

double eval_reactant(const KineticModel& m, double t) {
    require_kind(m, KineticKind::reactant);
    return m.amplitude * std::exp(-m.rate * (t - m.time_offset)) + m.baseline;
}

double eval_product(const KineticModel& m, double t) {
    require_kind(m, KineticKind::product);
    return m.amplitude * -std::expm1(-m.rate * (t - m.time_offset)) + m.baseline;
}

double eval_intermediate(const KineticModel& m, double t) {
    require_kind(m, KineticKind::intermediate);
    const double tau = t - m.time_offset;
    return m.amplitude * -std::expm1(-m.rate * tau) +
           m.secondary_amplitude * std::exp(-m.decay_rate * tau) + m.baseline;
}

double eval_kinetic(const KineticModel& m, double t) {
    switch (m.kind) {
    case KineticKind::reactant: return eval_reactant(m, t);
    case KineticKind::product: return eval_product(m, t);
    case KineticKind::intermediate: return eval_intermediate(m, t);
    }
    return 0.0;
}

std::optional<double> KineticParamValues::get(KineticParam p) const {
    switch (p) {
    case KineticParam::amplitude: return amplitude;
    case KineticParam::secondary_amplitude: return secondary_amplitude;
    case KineticParam::rate: return rate;
    case KineticParam::decay_rate: return decay_rate;
    case KineticParam::time_offset: return time_offset;
    case KineticParam::baseline: return baseline;
    }
    return std::nullopt;
}

void KineticParamValues::set(KineticParam p, double v) {
    switch (p) {
    case KineticParam::amplitude: amplitude = v; break;
    case KineticParam::secondary_amplitude: secondary_amplitude = v; break;
    case KineticParam::rate: rate = v; break;
    case KineticParam::decay_rate: decay_rate = v; break;
    case KineticParam::time_offset: time_offset = v; break;
    case KineticParam::baseline: baseline = v; break;
    }
}

// -------------------------------------------------------------
// Internal curve
// -------------------------------------------------------------

namespace kinetics_detail {

double curve(KineticKind kind, std::span<const double> p, double t, std::span<double> grad) {
    const double a = p[0];
    const double b = p[1];
    const double k = std::exp(p[2]);
    const double kd = std::exp(p[3]);
    const double tau = t - p[4];
    const double e = std::exp(-k * tau);
    grad[5] = 1.0;
    switch (kind) {
    case KineticKind::reactant:
        grad[0] = e;
        grad[2] = -a * e * tau * k;
        grad[4] = a * e * k;
        return a * e + p[5];
    case KineticKind::product:
        grad[0] = -std::expm1(-k * tau);
        grad[2] = a * e * tau * k;
        grad[4] = -a * e * k;
        return a * grad[0] + p[5];
    case KineticKind::intermediate: {
        const double ed = std::exp(-kd * tau);
        grad[0] = -std::expm1(-k * tau);
        grad[1] = ed;
        grad[2] = a * e * tau * k;
        grad[3] = -b * ed * tau * kd;
        grad[4] = -a * e * k + b * ed * kd;
        return a * grad[0] + b * ed + p[5];
    }
    }
    return 0.0;
}

} // namespace kinetics_detail

// -------------------------------------------------------------
// Fitting
// -------------------------------------------------------------

std::vector<KineticParam> default_free_params(KineticKind kind) {
    using P = KineticParam;
    switch (kind) {
    case KineticKind::reactant: return {P::amplitude, P::rate, P::baseline};
    case KineticKind::product: return {P::amplitude, P::rate, P::time_offset};
    case KineticKind::intermediate:
        return {P::amplitude, P::secondary_amplitude, P::rate, P::decay_rate, P::time_offset};
    }
    return {};
}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

constexpr KineticParam all_params[] = {KineticParam::amplitude, KineticParam::secondary_amplitude,
                                       KineticParam::rate,      KineticParam::decay_rate,
                                       KineticParam::time_offset, KineticParam::baseline};

std::size_t index_of(KineticParam p) { return static_cast<std::size_t>(p); }

bool is_rate(KineticParam p) { return p == KineticParam::rate || p == KineticParam::decay_rate; }

bool relevant(KineticKind kind, KineticParam p) {
    if (kind == KineticKind::intermediate) return true;
    return p != KineticParam::secondary_amplitude && p != KineticParam::decay_rate;
}

struct Setup {
    std::vector<bool> free;
    std::vector<double> pinned;  // natural-unit values for every slot
};

Setup make_setup(KineticKind kind, const KineticFitOptions& options) {
    Setup s;
    s.free.assign(6, false);
    s.pinned.assign(6, 0.0);
    const auto free_list = options.free.empty() ? default_free_params(kind) : options.free;
    for (KineticParam p : free_list) {
        if (relevant(kind, p)) s.free[index_of(p)] = true;
    }
    for (KineticParam p : all_params) {
        if (auto v = options.fixed.get(p)) {
            s.free[index_of(p)] = false;
            s.pinned[index_of(p)] = *v;
        }
    }
    // unused rate slots must stay finite in log space
    if (!relevant(kind, KineticParam::decay_rate)) s.pinned[index_of(KineticParam::decay_rate)] = 1.0;
    for (KineticParam p : all_params) {
        if (is_rate(p) && !s.free[index_of(p)] && relevant(kind, p) && !(s.pinned[index_of(p)] > 0.0)) {
            throw InvalidSpecError("fit_kinetic: pinned rates must be > 0");
        }
    }
    return s;
}

double log_or(double v, double fallback) { return v > 0.0 ? std::log(v) : std::log(fallback); }

// Linear least squares for the free linear slots (A, B, c) at fixed
// nonlinear slots; returns SSR and writes the solved slots into p.
double solve_linear_slots(KineticKind kind, const TimeSeries& trace, std::vector<double>& p,
                          const std::vector<bool>& free) {
    const std::size_t lin[] = {0, 1, 5};
    std::vector<std::size_t> cols;
    for (std::size_t s : lin) {
        if (free[s]) cols.push_back(s);
    }
    const auto t = trace.times();
    const auto y = trace.signal();
    const auto n = static_cast<Eigen::Index>(t.size());
    std::vector<double> grad(6);
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd rhs(n);
    std::vector<double> q = p;
    for (std::size_t s : cols) q[s] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::fill(grad.begin(), grad.end(), 0.0);
        rhs[i] = y[static_cast<std::size_t>(i)] - kinetics_detail::curve(kind, q, t[static_cast<std::size_t>(i)], grad);
        for (std::size_t c = 0; c < cols.size(); ++c) x(i, static_cast<Eigen::Index>(c)) = grad[cols[c]];
    }
    if (!cols.empty()) {
        const Eigen::VectorXd sol = x.colPivHouseholderQr().solve(rhs);
        for (std::size_t c = 0; c < cols.size(); ++c) p[cols[c]] = sol[static_cast<Eigen::Index>(c)];
    }
    const auto f = [kind](std::span<const double> pp, double tt, std::span<double> g) {
        return kinetics_detail::curve(kind, pp, tt, g);
    };
    return lsq::sum_squared_residuals(t, y, f, p);
}

// Starting point following the classic recipes: log-linear regression for
// decays, half-rise time for growth curves.
std::vector<double> recipe_start(KineticKind kind, const TimeSeries& trace, const Setup& s) {
    const auto t = trace.times();
    const auto y = trace.signal();
    const std::size_t n = t.size();
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = std::max(hi - lo, std::abs(hi) * 1e-12 + 1e-300);
    const double span = t[n - 1] - t[0];

    std::vector<double> p(6);
    for (std::size_t i = 0; i < 6; ++i) p[i] = s.pinned[i];
    const double t0 = s.free[4] ? 0.0 : s.pinned[4];
    p[4] = t0;

    double k = 1.0 / span;
    if (kind == KineticKind::reactant) {
        const double c = s.free[5] ? lo - 0.05 * range : s.pinned[5];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[i] - c;
            if (v <= 0.0) continue;
            const double ly = std::log(v);
            sx += t[i]; sy += ly; sxx += t[i] * t[i]; sxy += t[i] * ly;
            ++m;
        }
        double a = y[0] - c;
        if (m >= 2) {
            const double md = static_cast<double>(m);
            const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
            const double icpt = (sy - slope * sx) / md;
            if (slope < 0.0 && std::isfinite(slope)) k = -slope;
            a = std::exp(icpt - k * t0);
        }
        p[0] = a;
        p[5] = c;
    } else {
        const double c = s.pinned[5];
        const double a = (s.free[5] ? y[n - 1] : hi) - c;
        const double half = c + 0.5 * a;
        double t_half = t[n / 2];
        for (std::size_t i = 1; i < n; ++i) {
            if ((y[i - 1] - half) * (y[i] - half) <= 0.0 && y[i] != y[i - 1]) {
                t_half = t[i - 1] + (half - y[i - 1]) * (t[i] - t[i - 1]) / (y[i] - y[i - 1]);
                break;
            }
        }
        k = std::numbers::ln2 / std::max(t_half - t0, 0.1 * span / static_cast<double>(n));
        p[0] = a;
        p[5] = s.free[5] ? lo : c;
        if (kind == KineticKind::intermediate) {
            p[1] = y[0] - c;
        }
    }
    if (s.free[2]) p[2] = k;
    if (kind == KineticKind::intermediate && s.free[3]) p[3] = 0.5 * k;
    // log-space rate slots
    p[2] = log_or(p[2], 1.0 / span);
    p[3] = log_or(p[3], 1.0 / span);
    return p;
}

// Coarse grid over the rate slots with linear slots solved exactly; returns
// the `keep` lowest-residual grid points, best first.
std::vector<std::vector<double>> grid_starts(KineticKind kind, const TimeSeries& trace, const Setup& s,
                                             std::size_t keep) {
    const auto t = trace.times();
    const double span = t.back() - t.front();
    std::vector<double> base(6);
    for (std::size_t i = 0; i < 6; ++i) base[i] = s.pinned[i];
    base[4] = s.free[4] ? 0.0 : s.pinned[4];
    base[2] = log_or(base[2], 1.0 / span);
    base[3] = log_or(base[3], 1.0 / span);

    std::vector<double> rates;
    for (int i = 0; i < 16; ++i) rates.push_back(0.05 / span * std::pow(10.0, i * 3.0 / 15.0));

    std::vector<std::pair<double, std::vector<double>>> ranked;
    const auto consider = [&](std::vector<double> p) {
        const double ssr = solve_linear_slots(kind, trace, p, s.free);
        if (std::isfinite(ssr)) ranked.emplace_back(ssr, std::move(p));
    };
    // With A, B and t0 free the intermediate is A - A' e^{-kg t} + B' e^{-kd t}
    // in disguise; solve that linearly and map back to (A, B, t0).
    const bool unfold = kind == KineticKind::intermediate && s.free[0] && s.free[1] && s.free[4] &&
                        !s.free[5];
    const auto tv = trace.times();
    const auto yv = trace.signal();
    const auto n = static_cast<Eigen::Index>(tv.size());
    const auto consider_unfolded = [&](double k, double kd) {
        Eigen::MatrixXd x(n, 3);
        Eigen::VectorXd rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ti = tv[static_cast<std::size_t>(i)];
            x(i, 0) = 1.0;
            x(i, 1) = -std::exp(-k * ti);
            x(i, 2) = std::exp(-kd * ti);
            rhs[i] = yv[static_cast<std::size_t>(i)] - s.pinned[5];
        }
        const Eigen::VectorXd sol = x.colPivHouseholderQr().solve(rhs);
        if (!(sol[0] > 0.0 && sol[1] > 0.0)) return false;
        const double t0 = std::log(sol[1] / sol[0]) / k;
        if (!std::isfinite(t0)) return false;
        std::vector<double> p = base;
        p[0] = sol[0];
        p[1] = sol[2] * std::exp(-kd * t0);
        p[2] = std::log(k);
        p[3] = std::log(kd);
        p[4] = t0;
        const auto f = [kind](std::span<const double> pp, double tt, std::span<double> g) {
            return kinetics_detail::curve(kind, pp, tt, g);
        };
        const double ssr = lsq::sum_squared_residuals(tv, yv, f, p);
        if (std::isfinite(ssr)) ranked.emplace_back(ssr, std::move(p));
        return true;
    };

    const bool grid_k = s.free[2];
    const bool grid_kd = kind == KineticKind::intermediate && s.free[3];
    const std::vector<double> k_list = grid_k ? rates : std::vector<double>{std::exp(base[2])};
    const std::vector<double> kd_list = grid_kd ? rates : std::vector<double>{std::exp(base[3])};
    for (double k : k_list) {
        for (double kd : kd_list) {
            if (grid_k && grid_kd && k == kd) continue;
            if (unfold && consider_unfolded(k, kd)) continue;
            std::vector<double> p = base;
            p[2] = std::log(k);
            p[3] = std::log(kd);
            consider(std::move(p));
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < ranked.size() && out.size() < keep; ++i) out.push_back(std::move(ranked[i].second));
    if (out.empty()) out.push_back(base);
    return out;
}

KineticFit finish(KineticKind kind, const TimeSeries& trace, const Setup& s, const lsq::Result& r) {
    KineticFit fit;
    fit.points = trace.size();
    fit.free_parameters = r.free_count();
    fit.ssr = r.ssr;
    fit.iterations = r.iterations;
    fit.message = r.message;
    fit.ssr_gradient.assign(r.ssr_gradient.data(), r.ssr_gradient.data() + r.ssr_gradient.size());

    const auto value = [&](KineticParam p) {
        const std::size_t i = index_of(p);
        if (!r.free[i]) return s.pinned[i];  // bit-exact for pinned values
        return is_rate(p) ? std::exp(r.params[i]) : r.params[i];
    };
    fit.model.kind = kind;
    fit.model.amplitude = value(KineticParam::amplitude);
    fit.model.rate = value(KineticParam::rate);
    fit.model.time_offset = value(KineticParam::time_offset);
    fit.model.baseline = value(KineticParam::baseline);
    if (kind == KineticKind::intermediate) {
        fit.model.secondary_amplitude = value(KineticParam::secondary_amplitude);
        fit.model.decay_rate = value(KineticParam::decay_rate);
    }
    for (KineticParam p : all_params) {
        const std::size_t i = index_of(p);
        if (!r.free[i]) continue;
        const double sig = r.sigma(i);
        fit.uncertainty.set(p, is_rate(p) ? std::exp(r.params[i]) * sig : sig);
    }
    fit.converged = r.converged && std::isfinite(r.ssr);
    fit.aicc = lsq::aicc(r.ssr, trace.size(), fit.free_parameters);
    return fit;
}

} // namespace

KineticFit fit_kinetic(const TimeSeries& trace, KineticKind kind, const KineticFitOptions& options) {
    const Setup s = make_setup(kind, options);
    const std::size_t n_free = static_cast<std::size_t>(std::count(s.free.begin(), s.free.end(), true));
    if (trace.size() < n_free + 1) {
        throw InvalidSpecError("fit_kinetic: " + std::to_string(trace.size()) +
                               " points cannot constrain " + std::to_string(n_free) +
                               " free parameters");
    }

    const auto f = [kind](std::span<const double> p, double t, std::span<double> g) {
        return kinetics_detail::curve(kind, p, t, g);
    };
    lsq::Result best = lsq::fit_curve(trace.times(), trace.signal(), f,
                                      recipe_start(kind, trace, s), s.free, options.solver);
    const std::size_t keep = kind == KineticKind::intermediate ? 4 : 1;
    for (auto& p0 : grid_starts(kind, trace, s, keep)) {
        lsq::Result alt = lsq::fit_curve(trace.times(), trace.signal(), f, std::move(p0), s.free, options.solver);
        const bool alt_better = (alt.converged && !best.converged) ||
                                (alt.converged == best.converged && alt.ssr < best.ssr);
        if (alt_better || !std::isfinite(best.ssr)) best = std::move(alt);
    }
    return finish(kind, trace, s, best);
}

// -------------------------------------------------------------
// Rate coefficients
// -------------------------------------------------------------

double pseudo_first_order_k(const PseudoFirstOrderInput& in) {
    const double dc = in.conc_a1 - in.conc_a0;
    if (dc == 0.0) {
        throw InvalidSpecError("pseudo_first_order_k: [A]_1 equals [A]_0, k is undefined");
    }
    return (in.k1_prime - in.k0_prime) / dc;
}

RateUncertainty uncertainty_on_k(double k_prime, double sigma_k_prime, double conc,
                                 double sigma_conc, double tau_relative_error) {
    if (sigma_k_prime < 0.0 || sigma_conc < 0.0 || tau_relative_error < 0.0) {
        throw InvalidSpecError("uncertainty_on_k: uncertainties must be >= 0");
    }
    if (!(conc > 0.0)) throw InvalidSpecError("uncertainty_on_k: concentration must be > 0");
    RateUncertainty u;
    u.k = k_prime / conc;
    const double rk = k_prime != 0.0 ? sigma_k_prime / k_prime : 0.0;
    const double rc = sigma_conc / conc;
    u.relative = std::sqrt(rk * rk + rc * rc + tau_relative_error * tau_relative_error);
    u.sigma_k = std::abs(u.k) * u.relative;
    return u;
}

// -------------------------------------------------------------
// ODE oracle
// -------------------------------------------------------------

void ReactionConditions::validate() const {
    if (!(conc_oxidant > 0.0) || !(conc_organic_initial > 0.0) || !(temperature_k > 0.0)) {
        throw InvalidSpecError("ReactionConditions: concentrations and temperature must be > 0");
    }
}

OdeOracleResult ode_oracle(const ReactionConditions& cond, double k, std::span<const double> times) {
    cond.validate();
    if (!(k >= 0.0)) throw InvalidSpecError("ode_oracle: k must be >= 0");

    const ode::Rhs rhs = [k](double, std::span<const double> y, std::span<double> dy) {
        const double r = k * y[0] * y[1];
        dy[0] = -r;
        dy[1] = -r;
        dy[2] = r;
    };
    ode::Options opt;
    opt.relative_tolerance = 1e-9;
    opt.absolute_tolerance = 1e-3;
    const auto sol = ode::integrate(rhs, 0.0, {cond.conc_organic_initial, cond.conc_oxidant, 0.0},
                                    times, opt);
    OdeOracleResult out;
    out.times = sol.times;
    for (const auto& s : sol.states) {
        out.organic.push_back(s[0]);
        out.oxidant.push_back(s[1]);
        out.product.push_back(s[2]);
    }
    return out;
}

TimeSeries rescale_to_concentration(const TimeSeries& trace, const KineticModel& fitted,
                                    double conc0) {
    if (fitted.amplitude == 0.0) throw InvalidSpecError("rescale_to_concentration: zero amplitude");
    std::vector<double> t(trace.times().begin(), trace.times().end());
    std::vector<double> c;
    c.reserve(t.size());
    for (double v : trace.signal()) c.push_back((v - fitted.baseline) / fitted.amplitude * conc0);
    return TimeSeries(std::move(t), std::move(c));
}

} // namespace flowtube
