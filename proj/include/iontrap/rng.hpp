#pragma once

#include <cstdint>

#include "iontrap/vec3.hpp"

namespace iontrap {

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, c0, c1, c2), so results do not depend on evaluation
// order or thread count. Streams keep independent uses of the same
// (seed, step, ion) triple from colliding.
enum class RngStream : std::uint64_t {
    init_positions = 1,
    init_velocities,
    heating_kicks,
    kick_floor,
    collision_event,
    collision_neutral,
    collision_angle,
    reaction_fire,
    reaction_branch,
    reaction_recoil,
    noise,
};

namespace detail {
// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t rng_bits(std::uint64_t seed, RngStream stream, std::uint64_t c0,
                              std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
    using detail::mix64;
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(stream));
    h = mix64(h ^ c0);
    h = mix64(h ^ c1);
    h = mix64(h ^ c2);
    return h;
}

// uniform in [0, 1)
inline double rng_uniform(std::uint64_t seed, RngStream stream, std::uint64_t c0,
                          std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
    return static_cast<double>(rng_bits(seed, stream, c0, c1, c2) >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller; draw index k selects independent values
double rng_gaussian(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1,
                    std::uint64_t k);

// three independent standard normals
Vec3 rng_gaussian3(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1 = 0);

// isotropic unit vector
Vec3 rng_unit_vector(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1 = 0);

}  // namespace iontrap
