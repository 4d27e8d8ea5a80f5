#pragma once

// Measured tracer runs and ozonolysis product/reactant rates for the 1/4"
// PFA dual-arm reactor. Values are means over 4-7 repeats, the *_sd fields
// are the repeat standard deviations.

#include "flowtube/kinetics.hpp"

#include <span>

namespace flowtube::reference {

// Fixed geometry of the measured reactor.
inline constexpr double radius_m = 1.98e-3;
inline constexpr double fixed_length_m = 0.07;
inline constexpr double inlet_length_a_m = 0.065;
inline constexpr double inlet_length_b_m = 0.060;
inline constexpr double flow_a_sccm = 1600.0;
inline constexpr double flow_b_sccm = 100.0;

struct SymTracer {
    double mu, mu_sd, sigma, sigma_sd;
};

struct SymRtdRun {
    double tau_s;       // expected residence time
    double length_cm;   // variable tube length
    double flow_sccm;   // reactor flow
    bool exploratory;   // repeated runs after pressure adjustments, not used in regressions
    SymTracer acetone;
    SymTracer acetonitrile;
};

struct AsymTracer {
    double mu0, mu0_sd, sigma, sigma_sd, beta, beta_sd, eta, eta_sd, mean;
};

struct AsymRtdRun {
    double tau_s;
    double length_cm;
    double flow_sccm;
    AsymTracer acetone;
    AsymTracer acetonitrile;
};

std::span<const SymRtdRun> symmetric_rtd_runs();
std::span<const AsymRtdRun> asymmetric_rtd_runs();

struct SpeciesRecord {
    const char* name;     // neutral molecule as reported
    const char* ion;      // detected ion composition
    KineticKind kind;
    double rate;          // k' (k'_grow for the intermediate), 1/s
    double ratio;         // k' / k'(C6H12); 0 for the intermediate
    double decay_rate;    // intermediate only
};

std::span<const SpeciesRecord> ozonolysis_species();

// Gas-phase conditions of the ozonolysis run, molecules/cm^3.
inline constexpr double ozone_concentration = 1.85e14;
inline constexpr double tme_initial_concentration = 1.96e13;
inline constexpr double tme_ozone_k = 2.1e-15;     // cm^3/s
inline constexpr double tme_reference_rate = 0.39; // 1/s

} // namespace flowtube::reference
