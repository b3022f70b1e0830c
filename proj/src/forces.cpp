#include "iontrap/forces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

double ExcitationDrive::frequency_at(double t) const {
    if (!sweeping) return frequency;
    const double f = f_start + rate * t;
    return rate >= 0 ? std::min(f, f_end) : std::max(f, f_end);
}

double ExcitationDrive::phase_at(double t) const {
    if (!sweeping) return 2 * pi * frequency * t;
    // clamp the sweep once f_end is reached
    const double t_end = rate != 0 ? (f_end - f_start) / rate : 0.0;
    if (t <= t_end || t_end <= 0) return 2 * pi * (f_start * t + 0.5 * rate * t * t);
    const double phi_end = 2 * pi * (f_start * t_end + 0.5 * rate * t_end * t_end);
    return phi_end + 2 * pi * f_end * (t - t_end);
}

double ForceConfig::max_timestep(ForceMode mode, const TrapConfig& trap,
                                 std::span<const IonSpecies> table) {
    if (mode == ForceMode::rf_full) return (2 * pi / trap.omega_rf) / 50.0;
    double w_max = 0;
    for (const auto& sp : table) {
        const SecularFrequencies f = secular_frequencies(trap, sp);
        w_max = std::max({w_max, f.omega_r, f.omega_z});
    }
    if (w_max <= 0) throw std::invalid_argument("max_timestep: no confined species");
    return (2 * pi / w_max) / 100.0;
}

void ForceConfig::validate(const TrapConfig& t, std::span<const IonSpecies> table) const {
    t.validate();
    if (!(timestep > 0)) throw std::invalid_argument("ForceConfig: timestep must be > 0");
    const double ceiling = max_timestep(mode, t, table);
    if (timestep > ceiling * (1 + 1e-12))
        throw std::invalid_argument("ForceConfig: timestep too large for the mode");
}

namespace {

// force on row ion i from all j != i; returns min pair distance^2 in the row
inline double coulomb_row(const EnsembleState& s, std::span<const std::uint32_t> idx,
                          std::uint32_t i, double ke_qi, double& fx, double& fy, double& fz) {
    const double xi = s.x[i], yi = s.y[i], zi = s.z[i];
    double ax = 0, ay = 0, az = 0;
    double min_r2 = std::numeric_limits<double>::max();
    for (const std::uint32_t j : idx) {
        if (j == i) continue;
        const double dx = xi - s.x[j];
        const double dy = yi - s.y[j];
        const double dz = zi - s.z[j];
        const double r2 = dx * dx + dy * dy + dz * dz;
        min_r2 = std::min(min_r2, r2);
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        const double scale = ke_qi * s.ion(j).charge * inv_r3;
        ax += scale * dx;
        ay += scale * dy;
        az += scale * dz;
    }
    fx += ax;
    fy += ay;
    fz += az;
    return min_r2;
}

}  // namespace

double coulomb_forces_serial(const EnsembleState& state, std::span<const std::uint32_t> idx,
                             std::span<double> fx, std::span<double> fy, std::span<double> fz) {
    double min_r2 = std::numeric_limits<double>::max();
    for (const std::uint32_t i : idx) {
        const double ke_qi = coulomb_k * state.ion(i).charge;
        min_r2 = std::min(min_r2, coulomb_row(state, idx, i, ke_qi, fx[i], fy[i], fz[i]));
    }
    return min_r2;
}

double coulomb_forces_parallel(const EnsembleState& state, std::span<const std::uint32_t> idx,
                               std::span<double> fx, std::span<double> fy, std::span<double> fz) {
    const std::int64_t n = static_cast<std::int64_t>(idx.size());
    double min_r2 = std::numeric_limits<double>::max();
#pragma omp parallel for schedule(static) reduction(min : min_r2)
    for (std::int64_t k = 0; k < n; ++k) {
        const std::uint32_t i = idx[k];
        const double ke_qi = coulomb_k * state.ion(i).charge;
        min_r2 = std::min(min_r2, coulomb_row(state, idx, i, ke_qi, fx[i], fy[i], fz[i]));
    }
    return min_r2;
}

void trap_forces(const EnsembleState& state, std::span<const std::uint32_t> idx,
                 const ForceConfig& cfg, double t, std::span<double> fx, std::span<double> fy,
                 std::span<double> fz) {
    const TrapConfig& trap = cfg.trap;
    const double inv_r02 = 1.0 / (trap.r0 * trap.r0);
    const double drive_phase = cfg.drive ? cfg.drive->phase_at(t) : 0.0;
    const double drive_field = cfg.drive ? cfg.drive->amplitude * std::cos(drive_phase) : 0.0;
    const Vec3 drive_dir = cfg.drive ? cfg.drive->direction : Vec3{};

    const std::int64_t n = static_cast<std::int64_t>(idx.size());
    if (cfg.mode == ForceMode::rf_full) {
        // electrode pair potential Phi0(t) (x^2 - y^2)/(2 r0^2) with
        // Phi0 = V0 + V_DC - V_RF cos(Omega t), plus endcap kappa V_EC (z^2 - rho^2/2)
        const double phi0 =
            trap.v_offset + trap.v_dc - trap.v_rf * std::cos(trap.omega_rf * t);
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < n; ++k) {
            const std::uint32_t i = idx[k];
            const double q = state.ion(i).charge;
            fx[i] += -q * phi0 * inv_r02 * state.x[i] + q * trap.kappa * trap.v_ec * state.x[i];
            fy[i] += q * phi0 * inv_r02 * state.y[i] + q * trap.kappa * trap.v_ec * state.y[i];
            fz[i] += -2.0 * q * trap.kappa * trap.v_ec * state.z[i];
            if (cfg.drive) {
                fx[i] += q * drive_field * drive_dir.x;
                fy[i] += q * drive_field * drive_dir.y;
                fz[i] += q * drive_field * drive_dir.z;
            }
        }
    } else {
        // gradient of the time-averaged potential plus the static quadrupole;
        // spring constants may go negative (deconfined) during rf ramps
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < n; ++k) {
            const std::uint32_t i = idx[k];
            const IonSpecies& sp = state.ion(i);
            const double q = sp.charge;
            const double w0 = q * trap.v_rf / (std::sqrt(2.0) * sp.mass * trap.omega_rf *
                                               trap.r0 * trap.r0);
            const double wz2 = 2 * trap.kappa * q * trap.v_ec / sp.mass;
            const double wr2 = w0 * w0 - 0.5 * wz2;
            const double vs = trap.v_offset + trap.v_dc;
            const double wx2 = wr2 + q * vs / (sp.mass * trap.r0 * trap.r0);
            const double wy2 = wr2 - q * vs / (sp.mass * trap.r0 * trap.r0);
            fx[i] += -sp.mass * wx2 * state.x[i];
            fy[i] += -sp.mass * wy2 * state.y[i];
            fz[i] += -sp.mass * wz2 * state.z[i];
            if (cfg.drive) {
                fx[i] += q * drive_field * drive_dir.x;
                fy[i] += q * drive_field * drive_dir.y;
                fz[i] += q * drive_field * drive_dir.z;
            }
        }
    }
}

double trap_potential(const EnsembleState& state, std::size_t i, const ForceConfig& cfg,
                      double t) {
    const TrapConfig& trap = cfg.trap;
    const IonSpecies& sp = state.ion(i);
    const double q = sp.charge;
    const double x = state.x[i], y = state.y[i], z = state.z[i];
    if (cfg.mode == ForceMode::rf_full) {
        const double phi0 =
            trap.v_offset + trap.v_dc - trap.v_rf * std::cos(trap.omega_rf * t);
        const double quad = phi0 * (x * x - y * y) / (2 * trap.r0 * trap.r0);
        const double ec = trap.kappa * trap.v_ec * (z * z - 0.5 * (x * x + y * y));
        return q * (quad + ec);
    }
    const double w0 =
        q * trap.v_rf / (std::sqrt(2.0) * sp.mass * trap.omega_rf * trap.r0 * trap.r0);
    const double wz2 = 2 * trap.kappa * q * trap.v_ec / sp.mass;
    const double wr2 = w0 * w0 - 0.5 * wz2;
    const double vs = trap.v_offset + trap.v_dc;
    const double wx2 = wr2 + q * vs / (sp.mass * trap.r0 * trap.r0);
    const double wy2 = wr2 - q * vs / (sp.mass * trap.r0 * trap.r0);
    return 0.5 * sp.mass * (wx2 * x * x + wy2 * y * y + wz2 * z * z);
}

double coulomb_energy(const EnsembleState& state, std::span<const std::uint32_t> idx) {
    double e = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const std::uint32_t i = idx[a];
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const std::uint32_t j = idx[b];
            const double dx = state.x[i] - state.x[j];
            const double dy = state.y[i] - state.y[j];
            const double dz = state.z[i] - state.z[j];
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            e += coulomb_k * state.ion(i).charge * state.ion(j).charge / r;
        }
    }
    return e;
}

}  // namespace iontrap
