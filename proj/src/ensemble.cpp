#include "iontrap/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/constants.hpp"
#include "iontrap/rng.hpp"

namespace iontrap {

using namespace constants;

std::size_t EnsembleState::alive_count() const {
    std::size_t n = 0;
    for (auto a : alive) n += a;
    return n;
}

std::size_t EnsembleState::count_species(std::uint32_t s) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i)
        if (alive[i] && species[i] == s) ++n;
    return n;
}

std::uint32_t EnsembleState::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species_table.size(); ++i)
        if (species_table[i].name == name) return static_cast<std::uint32_t>(i);
    throw std::invalid_argument("unknown species in ensemble: " + name);
}

void EnsembleState::append_ion(std::uint32_t s, const Vec3& r, const Vec3& v) {
    x.push_back(r.x);
    y.push_back(r.y);
    z.push_back(r.z);
    vx.push_back(v.x);
    vy.push_back(v.y);
    vz.push_back(v.z);
    species.push_back(s);
    alive.push_back(1);
}

EnsembleState init_ensemble(const std::vector<SpeciesCount>& counts, const TrapConfig& trap,
                            std::uint64_t seed, double initial_temperature) {
    long total = 0;
    for (const auto& c : counts) {
        if (c.count < 0) throw std::invalid_argument("init_ensemble: negative count");
        total += c.count;
    }
    if (total < 1) throw std::invalid_argument("init_ensemble: empty ensemble");
    if (initial_temperature < 0)
        throw std::invalid_argument("init_ensemble: negative temperature");

    EnsembleState state;
    state.seed = seed;
    for (const auto& c : counts) state.species_table.push_back(c.species);

    std::uint64_t ion_id = 0;
    for (std::uint32_t si = 0; si < counts.size(); ++si) {
        const IonSpecies& sp = counts[si].species;
        if (counts[si].count == 0) continue;
        // per-species spheroid: volume N/n, aspect from the trap frequencies
        const PlasmaEstimate pe = plasma_estimate(trap, sp, std::max(initial_temperature, 1e-3));
        const SecularFrequencies f = secular_frequencies(trap, sp);
        const double aspect = f.omega_z > 0 ? f.omega_r / f.omega_z : 4.0;  // L/R
        const double volume = static_cast<double>(counts[si].count) / pe.density;
        const double radius = std::cbrt(3.0 * volume / (4.0 * pi * aspect));
        const double half_length = aspect * radius;

        const double sigma_v =
            initial_temperature > 0 ? std::sqrt(k_boltzmann * initial_temperature / sp.mass) : 0.0;

        for (long k = 0; k < counts[si].count; ++k, ++ion_id) {
            // rejection-free: uniform in unit ball, then scaled to the spheroid
            Vec3 u;
            std::uint64_t attempt = 0;
            do {
                u = {2 * rng_uniform(seed, RngStream::init_positions, ion_id, attempt, 0) - 1,
                     2 * rng_uniform(seed, RngStream::init_positions, ion_id, attempt, 1) - 1,
                     2 * rng_uniform(seed, RngStream::init_positions, ion_id, attempt, 2) - 1};
                ++attempt;
            } while (norm2(u) > 1.0);
            const Vec3 r{u.x * radius, u.y * radius, u.z * half_length};
            const Vec3 v = sigma_v * rng_gaussian3(seed, RngStream::init_velocities, ion_id);
            state.append_ion(si, r, v);
        }
    }
    return state;
}

void kick_ion(EnsembleState& state, std::size_t ion_index, const Vec3& delta_v) {
    if (ion_index >= state.size()) throw std::out_of_range("kick_ion: index out of range");
    if (!state.alive[ion_index]) throw std::invalid_argument("kick_ion: ion is not alive");
    state.vx[ion_index] += delta_v.x;
    state.vy[ion_index] += delta_v.y;
    state.vz[ion_index] += delta_v.z;
}

std::vector<double> instantaneous_temperatures(const EnsembleState& state) {
    std::vector<double> sum(state.species_table.size(), 0.0);
    std::vector<std::size_t> n(state.species_table.size(), 0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i]) continue;
        const double v2 = state.vx[i] * state.vx[i] + state.vy[i] * state.vy[i] +
                          state.vz[i] * state.vz[i];
        sum[state.species[i]] += v2;
        ++n[state.species[i]];
    }
    std::vector<double> t(sum.size(), 0.0);
    for (std::size_t s = 0; s < sum.size(); ++s)
        if (n[s] > 0)
            t[s] = state.species_table[s].mass * sum[s] /
                   (3.0 * k_boltzmann * static_cast<double>(n[s]));
    return t;
}

double kinetic_energy(const EnsembleState& state) {
    double e = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i]) continue;
        const double v2 = state.vx[i] * state.vx[i] + state.vy[i] * state.vy[i] +
                          state.vz[i] * state.vz[i];
        e += 0.5 * state.ion(i).mass * v2;
    }
    return e;
}

}  // namespace iontrap
