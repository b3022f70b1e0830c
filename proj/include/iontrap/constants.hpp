#pragma once

// Physical constants, CODATA 2018 exact/recommended values, SI units.
namespace iontrap::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double k_boltzmann = 1.380649e-23;            // J/K
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double planck_h = 6.62607015e-34;             // J s
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double speed_of_light = 299792458.0;          // m/s

// 1/(4 pi eps0)
inline constexpr double coulomb_k = 8.9875517873681764e9;  // N m^2 / C^2

}  // namespace iontrap::constants
