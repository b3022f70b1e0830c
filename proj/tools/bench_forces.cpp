// Benchmark of the Coulomb pair-sum kernels: serial reference vs the
// OpenMP row-parallel version used by the integrator.
//
//   bench_forces [N ...]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "iontrap/forces.hpp"
#include "iontrap/rng.hpp"

using namespace iontrap;

namespace {

EnsembleState random_cloud(std::size_t n) {
    EnsembleState s;
    IonSpecies be;
    be.name = "Be+";
    be.mass = 9.0121831 * constants::atomic_mass_unit;
    be.charge = constants::elementary_charge;
    s.species_table.push_back(be);
    s.seed = 7;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 r = 50e-6 * rng_gaussian3(7, RngStream::init_positions, i);
        s.append_ion(0, r, {});
    }
    return s;
}

double time_kernel(const EnsembleState& s, const std::vector<std::uint32_t>& idx, bool parallel,
                   int reps, double& checksum) {
    std::vector<double> fx(s.size()), fy(s.size()), fz(s.size());
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        std::fill(fx.begin(), fx.end(), 0.0);
        std::fill(fy.begin(), fy.end(), 0.0);
        std::fill(fz.begin(), fz.end(), 0.0);
        if (parallel)
            coulomb_forces_parallel(s, idx, fx, fy, fz);
        else
            coulomb_forces_serial(s, idx, fx, fy, fz);
    }
    const auto t1 = std::chrono::steady_clock::now();
    checksum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) checksum += fx[i] + fy[i] + fz[i];
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes;
    for (int i = 1; i < argc; ++i) sizes.push_back(std::strtoul(argv[i], nullptr, 10));
    if (sizes.empty()) sizes = {100, 200, 500, 1000, 2000};

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%8s %14s %14s %9s %12s\n", "N", "serial[ms]", "parallel[ms]", "speedup",
                "pairs/s");
    for (const std::size_t n : sizes) {
        const EnsembleState s = random_cloud(n);
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
        const int reps = n <= 500 ? 50 : 10;
        double c1 = 0, c2 = 0;
        const double ts = time_kernel(s, idx, false, reps, c1);
        const double tp = time_kernel(s, idx, true, reps, c2);
        std::printf("%8zu %14.3f %14.3f %9.2f %12.3g\n", n, ts * 1e3, tp * 1e3, ts / tp,
                    static_cast<double>(n) * (n - 1) / tp);
    }
    return 0;
}
