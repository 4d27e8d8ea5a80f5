#pragma once

// Dual-arm flow tube design: residence time, flow balance, restrictor
// pressure drop and flow-regime diagnostics.
//
// Flow network: inlets A and B merge at a tee, the mixture either goes
// through the reaction section (Q_reactor = Q_0 + Q_pump) or leaves through
// the exhaust arm (Q_exhaust = Q_A + Q_B - Q_reactor). A negative exhaust
// flow means gas is drawn back through the exhaust arm.

#include "flowtube/physchem.hpp"

namespace flowtube {

inline constexpr double critical_reynolds = 2300.0;
inline constexpr double default_taylor_aris_threshold = 10.0;

struct ReactorSpec {
    double radius_m = 0.0;             // internal radius r
    double fixed_length_m = 0.0;       // l_0, tee to detector without the variable section
    double variable_length_m = 0.0;    // L
    double inlet_length_a_m = 0.0;     // l_A
    double inlet_length_b_m = 0.0;     // l_B
    FlowRate flow_a;                   // Q_A
    FlowRate flow_b;                   // Q_B
    FlowRate sampling_flow;            // Q_0
    FlowRate pump_flow;                // Q_pump

    /// Geometry invariants only (r > 0, lengths >= 0); throws InvalidSpecError.
    void validate_geometry() const;

    double reactor_flow_sccm() const noexcept { return sampling_flow.sccm() + pump_flow.sccm(); }
    double exhaust_flow_sccm() const noexcept {
        return flow_a.sccm() + flow_b.sccm() - reactor_flow_sccm();
    }
};

struct FlowBalance {
    double reactor_sccm = 0.0;
    double exhaust_sccm = 0.0;
    bool operable = false;
};

/// Never throws; operable requires Q_exhaust >= 0 and Q_reactor > 0.
FlowBalance flow_balance(const ReactorSpec& spec) noexcept;

/// Plug-flow residence time from the tee to the detector plus both inlet
/// legs, in seconds. Throws BackDiffusionError when Q_exhaust < 0 and
/// InvalidSpecError for non-positive denominators or bad geometry.
double residence_time(const ReactorSpec& spec);

// ---------------------------------------------------------------------------
// Capillary restrictor
// ---------------------------------------------------------------------------

struct RestrictorGeometry {
    double radius_m = 0.0;           // r_0
    double shrinkage = 0.5;          // kappa, singular loss coefficient
    double upstream_radius_m = 0.0;  // radius before the contraction

    /// kappa ~ 0.5 (1 - r_0 / r_up) for a sudden contraction.
    static double default_shrinkage(double radius_m, double upstream_radius_m);
    static RestrictorGeometry with_default_shrinkage(double radius_m, double upstream_radius_m);

    void validate() const;
};

struct RestrictorSpec {
    RestrictorGeometry geometry;
    double length_m = 0.0;

    void validate() const;
};

struct PressureDrop {
    double total_pa = 0.0;
    double regular_pa = 0.0;   // Hagen-Poiseuille (Darcy-Weisbach with f = 64/Re)
    double singular_pa = 0.0;  // contraction loss

    double singular_fraction() const noexcept {
        return total_pa > 0.0 ? singular_pa / total_pa : 0.0;
    }
};

/// Incompressible estimate; adequate for order-of-magnitude sizing only.
PressureDrop capillary_pressure_drop(const RestrictorSpec& restrictor, FlowRate q0,
                                     const GasProperties& gas);

/// Restrictor length delivering `target_dp_pa` at flow q0. Throws
/// InfeasibleDesignError when the singular loss alone exceeds the target.
double restrictor_length_for_dp(const RestrictorGeometry& geometry, FlowRate q0,
                                const GasProperties& gas, double target_dp_pa);

// ---------------------------------------------------------------------------
// Flow regime
// ---------------------------------------------------------------------------

/// Re = rho v 2r / mu with v the mean velocity of Q_reactor.
double reynolds_number(const ReactorSpec& spec, const GasProperties& gas);

/// tau_diff = r^2 / D_m
double radial_diffusion_time(double radius_m, const GasProperties& gas);

struct RegimeReport {
    double reynolds = 0.0;
    double radial_diffusion_time_s = 0.0;
    double residence_time_s = 0.0;
    double taylor_aris_ratio = 0.0;
    bool laminar = false;
    bool symmetric_rtd_expected = false;
};

RegimeReport regime_report(const ReactorSpec& spec, const GasProperties& gas,
                           double taylor_aris_threshold = default_taylor_aris_threshold);

} // namespace flowtube
