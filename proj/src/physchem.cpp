#include "flowtube/physchem.hpp"

#include "flowtube/errors.hpp"

#include <cmath>
#include <string>

namespace flowtube {

namespace {
// 1 sccm = 1 cm^3/min = 1e-6 m^3 / 60 s
constexpr double sccm_per_m3s = 6.0e7;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidSpecError(std::string("GasProperties: ") + name + " must be finite and > 0");
    }
}
} // namespace

FlowRate::FlowRate(double sccm) : sccm_(sccm) {
    if (!(sccm >= 0.0) || !std::isfinite(sccm)) {
        throw InvalidSpecError("FlowRate: flow must be finite and >= 0 sccm");
    }
}

FlowRate FlowRate::from_m3_per_s(double q) { return FlowRate(m3s_to_sccm(q)); }

double FlowRate::m3_per_s() const noexcept { return sccm_ / sccm_per_m3s; }

double sccm_to_m3s(FlowRate q) { return q.m3_per_s(); }

double m3s_to_sccm(double q_m3s) { return q_m3s * sccm_per_m3s; }

GasProperties::GasProperties(double dynamic_viscosity_pa_s, double density_kg_m3,
                             double molecular_diffusivity_m2_s, double temperature_k,
                             double pressure_pa)
    : viscosity_(dynamic_viscosity_pa_s),
      density_(density_kg_m3),
      diffusivity_(molecular_diffusivity_m2_s),
      temperature_(temperature_k),
      pressure_(pressure_pa) {
    require_positive(viscosity_, "dynamic_viscosity");
    require_positive(density_, "density");
    require_positive(diffusivity_, "molecular_diffusivity");
    require_positive(temperature_, "temperature");
    require_positive(pressure_, "pressure");
}

GasProperties GasProperties::air_293k() {
    return GasProperties(1.81e-5, 1.20, 1.0e-5, 293.0, StandardConditions::pressure_pa);
}

} // namespace flowtube
