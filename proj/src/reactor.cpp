#include "flowtube/reactor.hpp"

#include "flowtube/errors.hpp"

#include <cmath>
#include <string>

namespace flowtube {

namespace {

void require_length(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidSpecError(std::string("ReactorSpec: ") + name + " must be finite and >= 0");
    }
}

double cross_section(double radius_m) { return pi * radius_m * radius_m; }

} // namespace

// -------------------------------------------------------------
// ReactorSpec
// -------------------------------------------------------------

void ReactorSpec::validate_geometry() const {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
        throw InvalidSpecError("ReactorSpec: internal radius must be > 0");
    }
    require_length(fixed_length_m, "fixed length l0");
    require_length(variable_length_m, "variable length L");
    require_length(inlet_length_a_m, "inlet length lA");
    require_length(inlet_length_b_m, "inlet length lB");
}

FlowBalance flow_balance(const ReactorSpec& spec) noexcept {
    FlowBalance fb;
    fb.reactor_sccm = spec.reactor_flow_sccm();
    fb.exhaust_sccm = spec.exhaust_flow_sccm();
    fb.operable = fb.exhaust_sccm >= 0.0 && fb.reactor_sccm > 0.0;
    return fb;
}

double residence_time(const ReactorSpec& spec) {
    spec.validate_geometry();

    const FlowBalance fb = flow_balance(spec);
    if (fb.exhaust_sccm < 0.0) {
        throw BackDiffusionError("back-diffusion: Q_exhaust = " + std::to_string(fb.exhaust_sccm) +
                                 " sccm < 0 (Q_reactor exceeds Q_A + Q_B)");
    }
    if (!(fb.reactor_sccm > 0.0)) {
        throw InvalidSpecError("residence_time: Q_reactor must be > 0");
    }
    if (!(spec.flow_a.sccm() > 0.0) || !(spec.flow_b.sccm() > 0.0)) {
        throw InvalidSpecError("residence_time: Q_A and Q_B must be > 0");
    }

    const double area = cross_section(spec.radius_m);
    const double q_reactor = FlowRate(fb.reactor_sccm).m3_per_s();
    const double reaction = area * (spec.fixed_length_m + spec.variable_length_m) / q_reactor;
    const double leg_a = area * spec.inlet_length_a_m / spec.flow_a.m3_per_s();
    const double leg_b = area * spec.inlet_length_b_m / spec.flow_b.m3_per_s();
    return reaction + leg_a + leg_b;
}

// -------------------------------------------------------------
// Restrictor
// -------------------------------------------------------------

double RestrictorGeometry::default_shrinkage(double radius_m, double upstream_radius_m) {
    if (!(upstream_radius_m > 0.0)) {
        throw InvalidSpecError("RestrictorGeometry: upstream radius must be > 0");
    }
    return 0.5 * (1.0 - radius_m / upstream_radius_m);
}

RestrictorGeometry RestrictorGeometry::with_default_shrinkage(double radius_m,
                                                              double upstream_radius_m) {
    RestrictorGeometry g{radius_m, default_shrinkage(radius_m, upstream_radius_m),
                         upstream_radius_m};
    g.validate();
    return g;
}

void RestrictorGeometry::validate() const {
    if (radius_m == 0.0) {
        throw SingularGeometryError("restrictor radius r0 = 0: pressure drop is unbounded");
    }
    if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
        throw InvalidSpecError("RestrictorGeometry: radius must be > 0");
    }
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
        throw InvalidSpecError("RestrictorGeometry: shrinkage coefficient must lie in [0, 1]");
    }
    if (!(radius_m < upstream_radius_m)) {
        throw InvalidSpecError("RestrictorGeometry: restrictor radius must be below upstream radius");
    }
}

void RestrictorSpec::validate() const {
    geometry.validate();
    if (!(length_m >= 0.0) || !std::isfinite(length_m)) {
        throw InvalidSpecError("RestrictorSpec: length must be >= 0");
    }
}

namespace {

double singular_loss(const RestrictorGeometry& g, double q, const GasProperties& gas) {
    const double r4 = std::pow(g.radius_m, 4);
    return g.shrinkage * gas.density() * q * q / (2.0 * pi * pi * r4);
}

} // namespace

PressureDrop capillary_pressure_drop(const RestrictorSpec& restrictor, FlowRate q0,
                                     const GasProperties& gas) {
    restrictor.validate();
    const double q = q0.m3_per_s();
    const double r4 = std::pow(restrictor.geometry.radius_m, 4);

    PressureDrop dp;
    dp.regular_pa = 8.0 * gas.dynamic_viscosity() * restrictor.length_m * q / (pi * r4);
    dp.singular_pa = singular_loss(restrictor.geometry, q, gas);
    dp.total_pa = dp.regular_pa + dp.singular_pa;
    return dp;
}

double restrictor_length_for_dp(const RestrictorGeometry& geometry, FlowRate q0,
                                const GasProperties& gas, double target_dp_pa) {
    geometry.validate();
    const double q = q0.m3_per_s();
    if (!(q > 0.0)) {
        throw InvalidSpecError("restrictor_length_for_dp: sampling flow must be > 0");
    }
    const double singular = singular_loss(geometry, q, gas);
    if (target_dp_pa < singular) {
        throw InfeasibleDesignError("target pressure drop " + std::to_string(target_dp_pa) +
                                    " Pa is below the contraction loss floor of " +
                                    std::to_string(singular) + " Pa");
    }
    const double r4 = std::pow(geometry.radius_m, 4);
    return (target_dp_pa - singular) * pi * r4 / (8.0 * gas.dynamic_viscosity() * q);
}

// -------------------------------------------------------------
// Regime
// -------------------------------------------------------------

double reynolds_number(const ReactorSpec& spec, const GasProperties& gas) {
    spec.validate_geometry();
    const double q_sccm = spec.reactor_flow_sccm();
    if (!(q_sccm > 0.0)) {
        throw InvalidSpecError("reynolds_number: Q_reactor must be > 0");
    }
    const double v = FlowRate(q_sccm).m3_per_s() / cross_section(spec.radius_m);
    return gas.density() * v * 2.0 * spec.radius_m / gas.dynamic_viscosity();
}

double radial_diffusion_time(double radius_m, const GasProperties& gas) {
    return radius_m * radius_m / gas.molecular_diffusivity();
}

RegimeReport regime_report(const ReactorSpec& spec, const GasProperties& gas,
                           double taylor_aris_threshold) {
    RegimeReport rep;
    rep.residence_time_s = residence_time(spec);
    rep.reynolds = reynolds_number(spec, gas);
    rep.radial_diffusion_time_s = radial_diffusion_time(spec.radius_m, gas);
    rep.taylor_aris_ratio = rep.residence_time_s / rep.radial_diffusion_time_s;
    rep.laminar = rep.reynolds < critical_reynolds;
    rep.symmetric_rtd_expected = rep.taylor_aris_ratio > taylor_aris_threshold;
    return rep;
}

} // namespace flowtube
