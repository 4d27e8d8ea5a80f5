#include "flowtube/errors.hpp"
#include "flowtube/reactor.hpp"
#include "flowtube/random.hpp"
#include "flowtube/reference_data.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace flowtube;

namespace {

ReactorSpec measured_reactor(double length_cm, double reactor_sccm) {
    ReactorSpec s;
    s.radius_m = reference::radius_m;
    s.fixed_length_m = reference::fixed_length_m;
    s.variable_length_m = units::cm(length_cm);
    s.inlet_length_a_m = reference::inlet_length_a_m;
    s.inlet_length_b_m = reference::inlet_length_b_m;
    s.flow_a = FlowRate(reference::flow_a_sccm);
    s.flow_b = FlowRate(reference::flow_b_sccm);
    s.sampling_flow = FlowRate(50.0);
    s.pump_flow = FlowRate(reactor_sccm - 50.0);
    return s;
}

// Plug-flow volume / flow, written out independently.
double tau_by_hand(const ReactorSpec& s) {
    const double area = std::numbers::pi * s.radius_m * s.radius_m;
    const double cm3s = 1e-6 / 60.0;
    return area * (s.fixed_length_m + s.variable_length_m) / ((s.sampling_flow.sccm() + s.pump_flow.sccm()) * cm3s) +
           area * s.inlet_length_a_m / (s.flow_a.sccm() * cm3s) + area * s.inlet_length_b_m / (s.flow_b.sccm() * cm3s);
}

GasProperties air() { return GasProperties::air_293k(); }

RestrictorGeometry capillary() {
    RestrictorGeometry g;
    g.radius_m = units::um(65.0);
    g.shrinkage = 0.5;
    g.upstream_radius_m = reference::radius_m;
    return g;
}

} // namespace

TEST_SUITE("reactor") {

TEST_CASE("residence time of the short configuration") {
    const auto s = measured_reactor(0.0, 252.0);
    CHECK(std::abs(residence_time(s) - 0.68) <= 0.01);
}

TEST_CASE("residence time matches the plug-flow sum") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto s = measured_reactor(rng.uniform(0.0, 800.0), rng.uniform(60.0, 1000.0));
        s.radius_m = rng.uniform(0.5e-3, 5e-3);
        CHECK(residence_time(s) == doctest::Approx(tau_by_hand(s)).epsilon(1e-13));
    }
}

TEST_CASE("zero volume gives zero residence time") {
    ReactorSpec s = measured_reactor(0.0, 300.0);
    s.fixed_length_m = s.inlet_length_a_m = s.inlet_length_b_m = 0.0;
    CHECK(residence_time(s) == 0.0);
}

TEST_CASE("residence time errors") {
    auto s = measured_reactor(0.0, 252.0);
    s.flow_a = FlowRate(100.0);
    s.flow_b = FlowRate(0.0);
    CHECK_THROWS_AS(residence_time(s), BackDiffusionError);

    auto z = measured_reactor(0.0, 252.0);
    z.flow_b = FlowRate(0.0);
    CHECK_THROWS_AS(residence_time(z), InvalidSpecError);

    auto r = measured_reactor(0.0, 252.0);
    r.radius_m = 0.0;
    CHECK_THROWS_AS(residence_time(r), InvalidSpecError);
    r.radius_m = 1e-3;
    r.fixed_length_m = -0.1;
    CHECK_THROWS_AS(residence_time(r), InvalidSpecError);
}

TEST_CASE("residence time homogeneity") {
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        const auto s = measured_reactor(rng.uniform(0.0, 700.0), rng.uniform(60.0, 900.0));
        const double k = rng.uniform(0.2, 5.0);
        ReactorSpec t = s;
        t.fixed_length_m *= k;
        t.variable_length_m *= k;
        t.inlet_length_a_m *= k;
        t.inlet_length_b_m *= k;
        t.flow_a = FlowRate(s.flow_a.sccm() * k);
        t.flow_b = FlowRate(s.flow_b.sccm() * k);
        t.sampling_flow = FlowRate(s.sampling_flow.sccm() * k);
        t.pump_flow = FlowRate(s.pump_flow.sccm() * k);
        CHECK(residence_time(t) == doctest::Approx(residence_time(s)).epsilon(1e-12));

        // scaling only the reactor flow scales the reactor term by 1/k
        ReactorSpec u = s;
        u.sampling_flow = FlowRate(s.sampling_flow.sccm() * k);
        u.pump_flow = FlowRate(s.pump_flow.sccm() * k);
        u.flow_a = FlowRate(std::max(s.flow_a.sccm(), u.reactor_flow_sccm()));
        ReactorSpec s2 = s;
        s2.flow_a = u.flow_a;
        ReactorSpec inlets_only = s2;
        inlets_only.fixed_length_m = inlets_only.variable_length_m = 0.0;
        const double reactor_term = residence_time(s2) - residence_time(inlets_only);
        ReactorSpec u_inlets = u;
        u_inlets.fixed_length_m = u_inlets.variable_length_m = 0.0;
        const double scaled_term = residence_time(u) - residence_time(u_inlets);
        CHECK(scaled_term == doctest::Approx(reactor_term / k).epsilon(1e-12));
    }
}

TEST_CASE("flow balance") {
    ReactorSpec s = measured_reactor(0.0, 252.0);
    s.sampling_flow = FlowRate(100.0);
    s.pump_flow = FlowRate(300.0);
    auto b = flow_balance(s);
    CHECK(b.reactor_sccm == 400.0);
    CHECK(b.exhaust_sccm == 1300.0);
    CHECK(b.operable);

    s.flow_a = FlowRate(100.0);
    s.flow_b = FlowRate(0.0);
    b = flow_balance(s);
    CHECK(b.exhaust_sccm == -300.0);
    CHECK_FALSE(b.operable);

    s.flow_a = FlowRate(1600.0);
    s.flow_b = FlowRate(100.0);
    s.pump_flow = FlowRate(0.0);
    s.sampling_flow = FlowRate(1700.0);
    b = flow_balance(s);
    CHECK(b.exhaust_sccm == 0.0);
    CHECK(b.operable);
}

TEST_CASE("flow balance conserves mass") {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        ReactorSpec s;
        s.flow_a = FlowRate(rng.uniform(0.0, 2000.0));
        s.flow_b = FlowRate(rng.uniform(0.0, 500.0));
        s.sampling_flow = FlowRate(rng.uniform(0.0, 200.0));
        s.pump_flow = FlowRate(rng.uniform(0.0, 2000.0));
        const auto b = flow_balance(s);
        CHECK(std::abs(s.flow_a.sccm() + s.flow_b.sccm() - b.exhaust_sccm - s.sampling_flow.sccm() -
                       s.pump_flow.sccm()) <= 1e-9);
        CHECK(b.operable == (b.exhaust_sccm >= 0.0 && b.reactor_sccm > 0.0));
    }
}

TEST_CASE("capillary pressure drop at the design point") {
    const PressureDrop dp = capillary_pressure_drop({capillary(), units::cm(4.6)}, FlowRate(50.0), air());
    CHECK(dp.total_pa == doctest::Approx(1e5).epsilon(0.05));
    CHECK(dp.singular_fraction() < 0.04);
    CHECK(dp.total_pa == dp.regular_pa + dp.singular_pa);

    // both terms written out
    const double q = 50.0 * 1e-6 / 60.0;
    const double r4 = std::pow(65e-6, 4);
    CHECK(dp.regular_pa == doctest::Approx(8.0 * 1.81e-5 * 0.046 * q / (std::numbers::pi * r4)).epsilon(1e-12));
    CHECK(dp.singular_pa ==
          doctest::Approx(0.5 * 1.2 * q * q / (2.0 * std::numbers::pi * std::numbers::pi * r4)).epsilon(1e-12));
}

TEST_CASE("capillary pressure drop limits and linearity") {
    const auto g = capillary();
    const auto zero = capillary_pressure_drop({g, 0.05}, FlowRate(0.0), air());
    CHECK(zero.total_pa == 0.0);
    const auto small = capillary_pressure_drop({g, 0.05}, FlowRate(1e-9), air());
    CHECK(small.total_pa < 1e-5);

    const auto one = capillary_pressure_drop({g, 0.03}, FlowRate(50.0), air());
    const auto two = capillary_pressure_drop({g, 0.06}, FlowRate(50.0), air());
    CHECK(two.regular_pa == doctest::Approx(2.0 * one.regular_pa).epsilon(1e-14));
    CHECK(two.singular_pa == one.singular_pa);

    RestrictorGeometry bad = g;
    bad.radius_m = 0.0;
    CHECK_THROWS_AS(capillary_pressure_drop({bad, 0.05}, FlowRate(50.0), air()), SingularGeometryError);
}

TEST_CASE("total drop is the exact sum of its parts") {
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        RestrictorGeometry g = capillary();
        g.radius_m = rng.uniform(20e-6, 200e-6);
        g.shrinkage = rng.uniform(0.0, 1.0);
        const auto dp = capillary_pressure_drop({g, rng.uniform(0.001, 0.5)}, FlowRate(rng.uniform(1.0, 500.0)), air());
        CHECK(dp.total_pa == dp.regular_pa + dp.singular_pa);
    }
}

TEST_CASE("restrictor length for 1 bar") {
    const double l = restrictor_length_for_dp(capillary(), FlowRate(50.0), air(), units::bar(1.0));
    CHECK(units::to_cm(l) == doctest::Approx(4.6).epsilon(0.05));
    const auto dp = capillary_pressure_drop({capillary(), l}, FlowRate(50.0), air());
    CHECK(dp.singular_fraction() < 0.04);
}

TEST_CASE("restrictor length boundaries") {
    const auto g = capillary();
    const double singular = capillary_pressure_drop({g, 0.0}, FlowRate(50.0), air()).singular_pa;
    CHECK(restrictor_length_for_dp(g, FlowRate(50.0), air(), singular) == doctest::Approx(0.0).scale(1e-12));
    CHECK_THROWS_AS(restrictor_length_for_dp(g, FlowRate(50.0), air(), 0.5 * singular), InfeasibleDesignError);
}

TEST_CASE("restrictor length round trip") {
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
        RestrictorGeometry g = capillary();
        g.radius_m = rng.uniform(30e-6, 150e-6);
        g.shrinkage = rng.uniform(0.0, 1.0);
        const FlowRate q(rng.uniform(5.0, 200.0));
        const double singular = capillary_pressure_drop({g, 0.0}, q, air()).singular_pa;
        const double target = singular * rng.uniform(1.5, 1e4);
        const double l = restrictor_length_for_dp(g, q, air(), target);
        CHECK(capillary_pressure_drop({g, l}, q, air()).total_pa == doctest::Approx(target).epsilon(1e-6));
    }
}

TEST_CASE("default shrinkage for a sudden contraction") {
    CHECK(RestrictorGeometry::default_shrinkage(65e-6, 1.98e-3) == doctest::Approx(0.5 * (1.0 - 65e-6 / 1.98e-3)));
    const auto g = RestrictorGeometry::with_default_shrinkage(65e-6, 1.98e-3);
    CHECK(g.shrinkage == doctest::Approx(0.4836).epsilon(1e-3));
    RestrictorGeometry bad = g;
    bad.upstream_radius_m = 50e-6;
    CHECK_THROWS_AS(bad.validate(), InvalidSpecError);
    bad = g;
    bad.shrinkage = 1.5;
    CHECK_THROWS_AS(bad.validate(), InvalidSpecError);
}

TEST_CASE("Reynolds numbers at the extreme flows") {
    CHECK(reynolds_number(measured_reactor(0.0, 62.0), air()) == doctest::Approx(22.0).epsilon(0.05));
    CHECK(reynolds_number(measured_reactor(0.0, 917.0), air()) == doctest::Approx(330.0).epsilon(0.05));
    const double re = reynolds_number(measured_reactor(0.0, 200.0), air());
    CHECK(reynolds_number(measured_reactor(0.0, 400.0), air()) == doctest::Approx(2.0 * re).epsilon(1e-14));
}

TEST_CASE("radial diffusion time") {
    CHECK(radial_diffusion_time(1.98e-3, air()) == doctest::Approx(0.4).epsilon(0.03));
    const double base = radial_diffusion_time(1.98e-3, air());
    CHECK(radial_diffusion_time(1.98e-3 * std::sqrt(60.0), air()) == doctest::Approx(60.0 * base).epsilon(1e-13));
}

TEST_CASE("regime report") {
    // tau_diff = 0.4 s exactly and a reactor length giving tau = 5 s
    const double r = reference::radius_m;
    const GasProperties gas(1.81e-5, 1.2, r * r / 0.4, 293.0, 101325.0);
    ReactorSpec s = measured_reactor(0.0, 252.0);
    const double inlets = residence_time(s) - (std::numbers::pi * r * r * s.fixed_length_m) / (252.0 * 1e-6 / 60.0);
    s.variable_length_m = (5.0 - inlets) * (252.0 * 1e-6 / 60.0) / (std::numbers::pi * r * r) - s.fixed_length_m;
    const RegimeReport rep = regime_report(s, gas);
    CHECK(rep.residence_time_s == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(rep.radial_diffusion_time_s == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rep.taylor_aris_ratio == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(rep.symmetric_rtd_expected);
    CHECK(rep.laminar);
    CHECK(rep.laminar == (rep.reynolds < critical_reynolds));

    const RegimeReport strict = regime_report(s, gas, 20.0);
    CHECK_FALSE(strict.symmetric_rtd_expected);

    ReactorSpec back = s;
    back.flow_a = FlowRate(10.0);
    CHECK_THROWS_AS(regime_report(back, gas), BackDiffusionError);
}

}
