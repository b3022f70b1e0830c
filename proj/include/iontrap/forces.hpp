#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "iontrap/ensemble.hpp"
#include "iontrap/trap.hpp"
#include "iontrap/vec3.hpp"

namespace iontrap {

enum class ForceMode { rf_full, pseudopotential };

// Spatially uniform oscillating field for secular excitation; optional
// linear frequency sweep.
struct ExcitationDrive {
    double amplitude = 0;  // V/m
    double frequency = 0;  // Hz
    Vec3 direction{1, 0, 0};
    bool sweeping = false;
    double f_start = 0, f_end = 0, rate = 0;  // Hz, Hz, Hz/s

    double frequency_at(double t) const;
    double phase_at(double t) const;  // rad, integral of 2 pi f
};

struct ForceConfig {
    ForceMode mode = ForceMode::pseudopotential;
    TrapConfig trap;
    double timestep = 0;  // s
    bool coulomb = true;
    std::optional<ExcitationDrive> drive;

    double min_pair_distance = 100e-9;  // abort below this separation
    double z_max = 0;                   // m, axial loss bound (0 = set at init: 5x half-length)

    // ceilings: rf period/50 in rf mode, shortest secular period/100 otherwise
    void validate(const TrapConfig& t, std::span<const IonSpecies> table) const;
    static double max_timestep(ForceMode mode, const TrapConfig& trap,
                               std::span<const IonSpecies> table);
};

// Coulomb pair sum, direct summation. Adds to f; returns the minimum pair
// distance squared seen. Row-major accumulation: force on ion i is summed
// over j in fixed ascending order, so the parallel version is bit-identical
// for any thread count.
double coulomb_forces_serial(const EnsembleState& state, std::span<const std::uint32_t> idx,
                             std::span<double> fx, std::span<double> fy, std::span<double> fz);
double coulomb_forces_parallel(const EnsembleState& state, std::span<const std::uint32_t> idx,
                               std::span<double> fx, std::span<double> fy, std::span<double> fz);

// trap + optional drive forces at time t (conservative part only)
void trap_forces(const EnsembleState& state, std::span<const std::uint32_t> idx,
                 const ForceConfig& cfg, double t, std::span<double> fx, std::span<double> fy,
                 std::span<double> fz);

// potential energy of the trap fields for one ion (pseudopotential mode uses
// the secular potential; rf mode uses the instantaneous fields)
double trap_potential(const EnsembleState& state, std::size_t i, const ForceConfig& cfg, double t);

// total Coulomb pair energy of alive ions (fixed-order serial sum)
double coulomb_energy(const EnsembleState& state, std::span<const std::uint32_t> idx);

}  // namespace iontrap
