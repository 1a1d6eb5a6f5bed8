#pragma once

// CODATA 2018 values, SI units.
namespace tightfocus::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;            // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double hbar = 1.054571817e-34;                  // J s
inline constexpr double boltzmann = 1.380649e-23;                // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg

namespace rb87 {
inline constexpr double mass = 86.909180527 * atomic_mass_unit;  // kg
inline constexpr double d2_wavelength = 780.241e-9;              // m (vacuum)
inline constexpr double d2_linewidth_mhz = 6.0666;               // Γ/2π in MHz
}  // namespace rb87

}  // namespace tightfocus::constants
