#pragma once

// Physical quantities shared by every module. Everything inside the library
// is SI; sccm, cm and mbar only appear at the API boundary through the
// helpers below.

#include <numbers>

namespace flowtube {

inline constexpr double pi = std::numbers::pi;

// Reference state for "standard" flows. Reactor operation is close to
// atmospheric, so a standard flow is used directly as the volumetric flow.
struct StandardConditions {
    static constexpr double temperature_k = 293.15;
    static constexpr double pressure_pa = 101325.0;
};

namespace units {
inline constexpr double cm(double v) { return v * 1e-2; }
inline constexpr double mm(double v) { return v * 1e-3; }
inline constexpr double um(double v) { return v * 1e-6; }
inline constexpr double mbar(double v) { return v * 1e2; }
inline constexpr double bar(double v) { return v * 1e5; }
inline constexpr double to_cm(double m) { return m * 1e2; }
} // namespace units

/// Gas flow in standard cubic centimetres per minute. Never negative.
class FlowRate {
public:
    constexpr FlowRate() = default;
    explicit FlowRate(double sccm);

    static FlowRate from_sccm(double sccm) { return FlowRate(sccm); }
    static FlowRate from_slm(double slm) { return FlowRate(slm * 1000.0); }
    static FlowRate from_m3_per_s(double q);

    double sccm() const noexcept { return sccm_; }
    double m3_per_s() const noexcept;

    friend bool operator==(FlowRate, FlowRate) = default;

private:
    double sccm_ = 0.0;
};

/// Converts a standard flow to volumetric m^3/s: q * 1e-6 / 60.
double sccm_to_m3s(FlowRate q);
double m3s_to_sccm(double q_m3s);

/// Carrier gas properties. Construction rejects any non-positive field.
class GasProperties {
public:
    GasProperties(double dynamic_viscosity_pa_s, double density_kg_m3,
                  double molecular_diffusivity_m2_s, double temperature_k, double pressure_pa);

    /// Air at 293 K and atmospheric pressure.
    static GasProperties air_293k();

    double dynamic_viscosity() const noexcept { return viscosity_; }
    double density() const noexcept { return density_; }
    double molecular_diffusivity() const noexcept { return diffusivity_; }
    double temperature() const noexcept { return temperature_; }
    double pressure() const noexcept { return pressure_; }

private:
    double viscosity_;
    double density_;
    double diffusivity_;
    double temperature_;
    double pressure_;
};

} // namespace flowtube
