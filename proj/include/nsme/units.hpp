#pragma once

// Unit conventions. User-facing energies are wavenumbers (cm^-1) and
// temperatures are Kelvin; everything inside the library is an angular
// frequency in rad/ps with hbar = 1.

#include <numbers>

namespace nsme::units {

inline constexpr double speed_of_light_cm_per_s = 2.99792458e10;
inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double boltzmann_J_per_K = 1.380649e-23;

/// rad/ps per cm^-1: 2 pi c with c in cm/ps.
inline constexpr double angular_per_wavenumber =
    2.0 * std::numbers::pi * speed_of_light_cm_per_s * 1e-12;

/// k_B in cm^-1 per Kelvin.
inline constexpr double boltzmann_wavenumber_per_K =
    boltzmann_J_per_K / (planck_J_s * speed_of_light_cm_per_s);

constexpr double to_angular(double wavenumber) { return wavenumber * angular_per_wavenumber; }
constexpr double to_wavenumber(double angular) { return angular / angular_per_wavenumber; }

/// k_B T in rad/ps.
constexpr double thermal_energy(double temperature_K) {
    return to_angular(boltzmann_wavenumber_per_K * temperature_K);
}

}  // namespace nsme::units
