#pragma once

#include <span>
#include <vector>

#include "iontrap/species.hpp"

namespace iontrap {

// Linear rf trap: rf drive Phi0 = V0 - V_RF cos(Omega t) on one electrode
// pair, endcap voltage V_EC for axial confinement, optional static
// quadrupole V_DC on the central electrodes.
struct TrapConfig {
    double r0 = 0;        // m, center-to-electrode distance
    double kappa = 0;     // 1/m^2, endcap geometry factor
    double omega_rf = 0;  // rad/s, drive angular frequency Omega
    double v_rf = 0;      // V, drive amplitude
    double v_ec = 0;      // V, endcap voltage
    double v_dc = 0;      // V, static quadrupole (deformation / ejection)
    double v_offset = 0;  // V, static offset V0 on the rf pair (ramp extraction)

    void validate() const;  // throws std::invalid_argument

    static TrapConfig from_preset(const PresetLibrary& lib, const std::string& name);
};

// q = 2 Q V_RF / (m Omega^2 r0^2)
double mathieu_q(const TrapConfig& trap, const IonSpecies& species);
inline bool mathieu_stable(double q) { return q < 0.9; }

struct SecularFrequencies {
    double omega0 = 0;  // rad/s, radial frequency without axial correction
    double omega_r = 0; // rad/s, (omega0^2 - omega_z^2/2)^(1/2)
    double omega_z = 0; // rad/s, axial frequency
};

// omega0 = Q V_RF / (sqrt(2) m Omega r0^2), omega_z = sqrt(2 kappa Q V_EC / m).
// Throws std::domain_error("radially deconfined") when omega0^2 - omega_z^2/2 <= 0.
SecularFrequencies secular_frequencies(const TrapConfig& trap, const IonSpecies& species);

// V_RF that puts the species' radial secular frequency at omega_r_target
double calibrate_v_rf(const TrapConfig& trap, const IonSpecies& species, double omega_r_target);

struct PlasmaEstimate {
    double density = 0;    // 1/m^3
    double spacing = 0;    // m, a = n^(-1/3)
    double gamma = 0;      // Coulomb coupling parameter at the given temperature
    double t_crystal = 0;  // K, temperature where gamma = 170
};

// Cold-plasma density n = eps0 V_RF^2 / (m Omega^2 r0^4). The printed
// expression carries a stray factor Q with the wrong dimension; this is the
// dimensionally consistent variant and it reproduces the a ~ 30 um and
// ~ 3 mK checkpoints.
PlasmaEstimate plasma_estimate(const TrapConfig& trap, const IonSpecies& species,
                               double temperature);

// r1/r2 = sqrt(Q2 m1 / (Q1 m2)); requires m1/Q1 <= m2/Q2
double radius_ratio(const IonSpecies& inner, const IonSpecies& outer);

struct CollisionRates {
    double h_coll = 0;         // K/s (energy rate in units of kB)
    double gamma_elastic = 0;  // 1/s per ion
    double mean_transfer = 0;  // K (energy per collision in units of kB)
};

// Ion-neutral induced-dipole collision rates,
//   h_coll = (3*2.21/4) (e kB / eps0) n_n sqrt(alpha mu) (T_n - T_c)/(m_n + m_c)
//   gamma_elastic = (2.21/4) (e / eps0) n_n sqrt(alpha / mu)
// with alpha the SI polarizability.
CollisionRates collision_rates(const IonSpecies& ion, double ion_temperature,
                               const NeutralGas& gas);

// Langevin capture rate k_L = Q sqrt(pi alpha_v / (eps0 mu)), m^3/s, using the
// polarizability volume. Independent of gas temperature and pressure.
double langevin_rate(const IonSpecies& ion, const NeutralGas& gas);

// Steady state of viscous cooling against a heating rate h (K/s):
// T = h m / beta. beta = 0 with h > 0 has no equilibrium; returns +inf.
double equilibrium_temperature(const IonSpecies& species, double heating_rate);

struct SpeciesRateRow {
    IonSpecies species;
    long count = 0;           // N_j
    double temperature = 0;   // K
    double cooling_rate = 0;  // K/s, filled by energy_balance for the LC row
    double heating_rate = 0;  // K/s
};

struct EnergyBalance {
    double residual = 0;                  // K/s * ions, sum over (c_j + h_j) N_j
    double lc_temperature_predicted = 0;  // K
    double lc_cooling_rate = 0;           // K/s, c = -(beta/m) T_LC
    double gross_cooling = 0;             // K/s * ions, sum |c_j| N_j
};

// Requires exactly one laser-cooled row. Cooling rate is -(beta/m) T for the
// LC row and 0 otherwise; predicted T_LC solves
// (beta/m) T_LC = sum_j h_j N_j / N_LC.
EnergyBalance energy_balance(std::span<const SpeciesRateRow> rows);

// Two-species calibration step: h = (beta/m) T_LC0 N_LC0 / (N_LC0 + N_SC20)
double common_heating_rate(double beta_per_mass, double t_lc0, long n_lc0, long n_sc20);

}  // namespace iontrap
