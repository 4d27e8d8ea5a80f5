#pragma once

// Kinetic trace models, pseudo-first-order rate extraction and the
// bimolecular ODE oracle used to validate the pseudo-first-order limit.
//
//   reactant      A exp(-k'(t - t0)) + c
//   product       A (1 - exp(-k'(t - t0))) + c
//   intermediate  A (1 - exp(-k'_grow (t - t0))) + B exp(-k'_decay (t - t0)) + c

#include "flowtube/lsq.hpp"
#include "flowtube/timeseries.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowtube {

enum class KineticKind { reactant, product, intermediate };

std::string_view to_string(KineticKind kind);

struct KineticModel {
    KineticKind kind = KineticKind::reactant;
    double amplitude = 0.0;            // A
    double secondary_amplitude = 0.0;  // B, intermediate only
    double rate = 0.0;                 // k' (k'_grow for intermediates), 1/s
    double decay_rate = 0.0;           // k'_decay, intermediate only
    double time_offset = 0.0;          // t0, s
    double baseline = 0.0;             // c
};

double eval_reactant(const KineticModel& m, double t);
double eval_product(const KineticModel& m, double t);
double eval_intermediate(const KineticModel& m, double t);
double eval_kinetic(const KineticModel& m, double t);

enum class KineticParam { amplitude, secondary_amplitude, rate, decay_rate, time_offset, baseline };

struct KineticParamValues {
    std::optional<double> amplitude;
    std::optional<double> secondary_amplitude;
    std::optional<double> rate;
    std::optional<double> decay_rate;
    std::optional<double> time_offset;
    std::optional<double> baseline;

    std::optional<double> get(KineticParam p) const;
    void set(KineticParam p, double v);
};

struct KineticFitOptions {
    // Pinned parameters; never move during the fit.
    KineticParamValues fixed;
    // Explicit free set. When empty the per-kind default applies:
    //   reactant {A, k', c} (t0 pinned, it is degenerate with A),
    //   product {A, k', t0}, intermediate {A, B, k'_grow, k'_decay, t0}.
    // Parameters that are neither free nor fixed are pinned at 0.
    std::vector<KineticParam> free;
    lsq::Options solver;
};

struct KineticFit {
    KineticModel model;
    KineticParamValues uncertainty;  // 1-sigma for free parameters
    double ssr = 0.0;
    bool converged = false;
    int iterations = 0;
    std::size_t points = 0;
    std::size_t free_parameters = 0;
    double aicc = 0.0;
    std::string message;
    std::vector<double> ssr_gradient;  // internal coordinates (log rates)
};

std::vector<KineticParam> default_free_params(KineticKind kind);

/// Least-squares fit of one kinetic model. Throws InvalidSpecError when the
/// trace has fewer than (free parameters + 1) points.
KineticFit fit_kinetic(const TimeSeries& trace, KineticKind kind,
                       const KineticFitOptions& options = {});

// ---------------------------------------------------------------------------
// Rate coefficients
// ---------------------------------------------------------------------------

struct PseudoFirstOrderInput {
    double k0_prime = 0.0;  // decay rate at [A]_0, 1/s
    double k1_prime = 0.0;  // decay rate at [A]_1, 1/s
    double conc_a0 = 0.0;   // molecules/cm^3
    double conc_a1 = 0.0;
};

/// k = (k1' - k0') / ([A]_1 - [A]_0); first-order losses common to both cancel.
double pseudo_first_order_k(const PseudoFirstOrderInput& input);

struct RateUncertainty {
    double k = 0.0;         // cm^3/s
    double sigma_k = 0.0;   // cm^3/s
    double relative = 0.0;  // sigma_k / k
};

/// Relative errors of k', [oxidant] and residence time combined in quadrature.
RateUncertainty uncertainty_on_k(double k_prime, double sigma_k_prime, double conc,
                                 double sigma_conc, double tau_relative_error);

// ---------------------------------------------------------------------------
// Bimolecular oracle: organic + oxidant -> product
// ---------------------------------------------------------------------------

struct ReactionConditions {
    double conc_oxidant = 0.0;           // molecules/cm^3
    double conc_organic_initial = 0.0;   // molecules/cm^3
    double temperature_k = 293.15;

    void validate() const;
};

struct OdeOracleResult {
    std::vector<double> times;
    std::vector<double> organic;
    std::vector<double> oxidant;
    std::vector<double> product;
};

/// Integrates d[org]/dt = d[ox]/dt = -k[ox][org], d[P]/dt = +k[ox][org]
/// from t = 0 with rtol 1e-9, atol 1e-3 cm^-3.
OdeOracleResult ode_oracle(const ReactionConditions& cond, double k, std::span<const double> times);

/// Maps a raw reactant trace onto concentration using its fitted model:
/// (signal - baseline) / amplitude * conc0.
TimeSeries rescale_to_concentration(const TimeSeries& trace, const KineticModel& fitted,
                                    double conc0);

namespace kinetics_detail {
// Internal parameter vector [A, B, ln k', ln k'_decay, t0, c]
double curve(KineticKind kind, std::span<const double> p, double t, std::span<double> grad);
} // namespace kinetics_detail

} // namespace flowtube
