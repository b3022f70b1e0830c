#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iontrap/species.hpp"
#include "iontrap/trap.hpp"
#include "iontrap/vec3.hpp"

namespace iontrap {

// All ions, structure-of-arrays. Single-owner mutable object: exactly one
// evolving context at a time. Identical (seed, config) reproduces the
// trajectory bit for bit.
struct EnsembleState {
    std::vector<double> x, y, z;     // m
    std::vector<double> vx, vy, vz;  // m/s
    std::vector<std::uint32_t> species;
    std::vector<std::uint8_t> alive;
    std::vector<IonSpecies> species_table;

    double time = 0;
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;

    std::size_t size() const { return x.size(); }
    std::size_t alive_count() const;
    std::size_t count_species(std::uint32_t s) const;  // alive only
    Vec3 position(std::size_t i) const { return {x[i], y[i], z[i]}; }
    Vec3 velocity(std::size_t i) const { return {vx[i], vy[i], vz[i]}; }
    const IonSpecies& ion(std::size_t i) const { return species_table[species[i]]; }

    std::uint32_t species_index(const std::string& name) const;  // throws if unknown

    void set_species(std::size_t i, std::uint32_t s) { species[i] = s; }
    void append_ion(std::uint32_t s, const Vec3& r, const Vec3& v);
};

struct SpeciesCount {
    IonSpecies species;
    long count = 0;
};

// Positions sampled uniformly inside the per-species zero-temperature
// spheroid from plasma_estimate, velocities Maxwell-Boltzmann at
// initial_temperature. Deterministic in seed.
EnsembleState init_ensemble(const std::vector<SpeciesCount>& counts, const TrapConfig& trap,
                            std::uint64_t seed, double initial_temperature);

// velocity increment on one ion (head-on-collision scenario)
void kick_ion(EnsembleState& state, std::size_t ion_index, const Vec3& delta_v);

// instantaneous per-species temperature m <v^2> / (3 kB), alive ions
std::vector<double> instantaneous_temperatures(const EnsembleState& state);

// kinetic energy of alive ions, J
double kinetic_energy(const EnsembleState& state);

}  // namespace iontrap
