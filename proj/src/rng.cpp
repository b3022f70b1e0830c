#include "iontrap/rng.hpp"

#include <cmath>

#include "iontrap/constants.hpp"

namespace iontrap {

double rng_gaussian(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1,
                    std::uint64_t k) {
    // Box-Muller pair (k/2); k even -> cosine branch, odd -> sine branch.
    const std::uint64_t pair = k / 2;
    // u1 in (0, 1] so the log stays finite
    const double u1 =
        (static_cast<double>(rng_bits(seed, stream, c0, c1, 2 * pair) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = rng_uniform(seed, stream, c0, c1, 2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * constants::pi * u2;
    return (k % 2 == 0) ? r * std::cos(phi) : r * std::sin(phi);
}

Vec3 rng_gaussian3(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1) {
    return {rng_gaussian(seed, stream, c0, c1, 0), rng_gaussian(seed, stream, c0, c1, 1),
            rng_gaussian(seed, stream, c0, c1, 2)};
}

Vec3 rng_unit_vector(std::uint64_t seed, RngStream stream, std::uint64_t c0, std::uint64_t c1) {
    // uniform on the sphere from cos(theta) and phi
    const double c = 2.0 * rng_uniform(seed, stream, c0, c1, 0) - 1.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = 2.0 * constants::pi * rng_uniform(seed, stream, c0, c1, 1);
    return {s * std::cos(phi), s * std::sin(phi), c};
}

}  // namespace iontrap
