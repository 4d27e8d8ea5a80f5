#pragma once

// Monoisotopic atomic masses (Da) used for exact-mass work.

namespace flowtube::elements {

inline constexpr double carbon = 12.0;
inline constexpr double hydrogen = 1.007825;
inline constexpr double oxygen = 15.994915;
inline constexpr double nitrogen = 14.003074;
inline constexpr double electron = 0.000549;

/// Mass of C_c H_h O_o N_n carrying `charge` elementary charges (electrons removed).
constexpr double ion_mass(int c, int h, int o, int n, int charge) {
    return c * carbon + h * hydrogen + o * oxygen + n * nitrogen - charge * electron;
}

} // namespace flowtube::elements
