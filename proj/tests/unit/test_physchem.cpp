#include "flowtube/errors.hpp"
#include "flowtube/physchem.hpp"
#include "flowtube/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace flowtube;

TEST_SUITE("physchem") {

TEST_CASE("sccm to m3/s") {
    CHECK(sccm_to_m3s(FlowRate(0.0)) == 0.0);
    CHECK(sccm_to_m3s(FlowRate(60.0)) == doctest::Approx(1e-6).epsilon(1e-15));
    CHECK(sccm_to_m3s(FlowRate(50.0)) == doctest::Approx(50.0 / 60.0 * 1e-6).epsilon(1e-15));
    CHECK(FlowRate::from_slm(1.6).sccm() == doctest::Approx(1600.0));
}

TEST_CASE("sccm round trip within an ulp") {
    Rng rng(11);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 1000; ++i) {
        const double q = std::exp(rng.uniform(-5.0, 10.0));
        const double back = m3s_to_sccm(sccm_to_m3s(FlowRate(q)));
        CHECK(std::abs(back - q) <= 2.0 * eps * q);
        CHECK(FlowRate::from_m3_per_s(FlowRate(q).m3_per_s()).sccm() == doctest::Approx(q).epsilon(4 * eps));
    }
}

TEST_CASE("negative flow rejected") {
    CHECK_THROWS_AS(FlowRate(-1.0), InvalidSpecError);
    CHECK_THROWS_AS(FlowRate(std::nan("")), InvalidSpecError);
}

TEST_CASE("gas properties reject non-positive fields") {
    CHECK_NOTHROW(GasProperties(1.81e-5, 1.2, 1e-5, 293.0, 101325.0));
    CHECK_THROWS_AS(GasProperties(0.0, 1.2, 1e-5, 293.0, 101325.0), InvalidSpecError);
    CHECK_THROWS_AS(GasProperties(1.81e-5, -1.2, 1e-5, 293.0, 101325.0), InvalidSpecError);
    CHECK_THROWS_AS(GasProperties(1.81e-5, 1.2, 0.0, 293.0, 101325.0), InvalidSpecError);
    CHECK_THROWS_AS(GasProperties(1.81e-5, 1.2, 1e-5, 0.0, 101325.0), InvalidSpecError);
    CHECK_THROWS_AS(GasProperties(1.81e-5, 1.2, 1e-5, 293.0, -5.0), InvalidSpecError);
}

TEST_CASE("air defaults") {
    const auto air = GasProperties::air_293k();
    CHECK(air.dynamic_viscosity() == 1.81e-5);
    CHECK(air.density() == 1.20);
    CHECK(air.molecular_diffusivity() == 1e-5);
    CHECK(air.temperature() == 293.0);
}

TEST_CASE("unit helpers") {
    CHECK(units::cm(7.0) == doctest::Approx(0.07));
    CHECK(units::mm(1.98) == doctest::Approx(1.98e-3));
    CHECK(units::um(65.0) == doctest::Approx(65e-6));
    CHECK(units::bar(1.0) == 1e5);
    CHECK(units::mbar(1.0) == 100.0);
}

}
