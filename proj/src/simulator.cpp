#include "iontrap/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "iontrap/constants.hpp"
#include "iontrap/rng.hpp"

namespace iontrap {

using namespace constants;

Simulator::Simulator(EnsembleState state, ForceConfig config, HeatingModel heating)
    : state_(std::move(state)), config_(std::move(config)), heating_(std::move(heating)) {
    config_.validate(config_.trap, state_.species_table);
    const std::size_t n = state_.size();
    fx_.resize(n);
    fy_.resize(n);
    fz_.resize(n);
    if (config_.mode == ForceMode::rf_full) {
        steps_per_period_ =
            std::max<std::size_t>(1, std::llround(2 * pi / (config_.trap.omega_rf * config_.timestep)));
        acc_vx_.assign(n, 0);
        acc_vy_.assign(n, 0);
        acc_vz_.assign(n, 0);
        sec_vx_.assign(n, 0);
        sec_vy_.assign(n, 0);
        sec_vz_.assign(n, 0);
    }
    if (config_.z_max <= 0) {
        // default axial loss bound: 5x the largest initial |z| extent, floored
        // at the electrode distance
        double zmax = 0;
        for (std::size_t i = 0; i < n; ++i) zmax = std::max(zmax, std::abs(state_.z[i]));
        config_.z_max = std::max(5.0 * zmax, config_.trap.r0);
    }
    rebuild_alive();
}

void Simulator::rebuild_alive() {
    alive_.clear();
    for (std::size_t i = 0; i < state_.size(); ++i)
        if (state_.alive[i]) alive_.push_back(static_cast<std::uint32_t>(i));
}

void Simulator::refresh() {
    rebuild_alive();
}

void Simulator::compute_forces(double t) {
    std::fill(fx_.begin(), fx_.end(), 0.0);
    std::fill(fy_.begin(), fy_.end(), 0.0);
    std::fill(fz_.begin(), fz_.end(), 0.0);
    trap_forces(state_, alive_, config_, t, fx_, fy_, fz_);
    if (config_.coulomb && alive_.size() > 1) {
        const double min_r2 = coulomb_forces_parallel(state_, alive_, fx_, fy_, fz_);
        const double lim = config_.min_pair_distance;
        if (min_r2 < lim * lim)
            throw SimulationError("ion pair closer than the minimum distance; timestep too "
                                  "large or configuration nonphysical",
                                  0, state_.time);
    }
}

void Simulator::dissipative_substep() {
    const double dt = config_.timestep;
    const std::uint64_t step = state_.step_index;
    const std::uint64_t seed = state_.seed;
    const std::int64_t n = static_cast<std::int64_t>(alive_.size());

    const bool has_collisions = heating_.collisions && heating_.collisions->gamma_per_ion > 0 &&
                                heating_.collisions->gas.pressure >= 0;

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const std::uint32_t i = alive_[k];
        const IonSpecies& sp = state_.ion(i);

        // viscous laser cooling (-beta vz + light pressure) e_z, exact update
        if (cooling_.laser_on(sp, state_.species[i])) {
            if (sp.beta > 0) {
                const double damp = std::exp(-sp.beta / sp.mass * dt);
                const double v_drift = sp.light_pressure / sp.beta;
                state_.vz[i] = state_.vz[i] * damp + v_drift * (1.0 - damp);
            } else if (sp.light_pressure != 0) {
                state_.vz[i] += sp.light_pressure / sp.mass * dt;
            }
        }

        // artificial isotropic relax friction
        if (cooling_.relax_beta_per_mass > 0) {
            const double damp = std::exp(-cooling_.relax_beta_per_mass * dt);
            state_.vx[i] *= damp;
            state_.vy[i] *= damp;
            state_.vz[i] *= damp;
        }

        // uniform heating kicks: sigma^2 = 2 h kB dt / (3 m) per axis
        const double h = heating_.rate_for(state_.species[i]);
        if (h > 0 || heating_.kick_floor > 0) {
            double sigma2 = h > 0 ? 2.0 * h * k_boltzmann * dt / (3.0 * sp.mass) : 0.0;
            sigma2 += heating_.kick_floor * heating_.kick_floor;
            const double sigma = std::sqrt(sigma2);
            const Vec3 g = rng_gaussian3(seed, RngStream::heating_kicks, step, i);
            state_.vx[i] += sigma * g.x;
            state_.vy[i] += sigma * g.y;
            state_.vz[i] += sigma * g.z;
        }

        // discrete elastic collision with a Maxwell-Boltzmann neutral
        if (has_collisions) {
            const double p = heating_.collisions->gamma_per_ion * dt;
            if (rng_uniform(seed, RngStream::collision_event, step, i) < p) {
                const NeutralGas& gas = heating_.collisions->gas;
                const double sv = std::sqrt(k_boltzmann * gas.temperature / gas.mass);
                const Vec3 vn = sv * rng_gaussian3(seed, RngStream::collision_neutral, step, i);
                const Vec3 v{state_.vx[i], state_.vy[i], state_.vz[i]};
                const double mc = sp.mass, mn = gas.mass;
                const Vec3 w = (1.0 / (mc + mn)) * (mc * v + mn * vn);
                const double g_mag = norm(v - vn);
                const Vec3 dir = rng_unit_vector(seed, RngStream::collision_angle, step, i);
                const Vec3 v_new = w + (mn / (mc + mn)) * g_mag * dir;
                state_.vx[i] = v_new.x;
                state_.vy[i] = v_new.y;
                state_.vz[i] = v_new.z;
            }
        }
    }
}

void Simulator::check_losses() {
    bool any_dead = false;
    for (const std::uint32_t i : alive_) {
        const double r2 = state_.x[i] * state_.x[i] + state_.y[i] * state_.y[i];
        const bool lost = r2 > config_.trap.r0 * config_.trap.r0 ||
                          std::abs(state_.z[i]) > config_.z_max;
        if (lost) {
            state_.alive[i] = 0;
            escapes_.push_back({state_.time, i, state_.species[i], config_.trap.v_rf});
            any_dead = true;
        }
        if (!std::isfinite(state_.x[i]) || !std::isfinite(state_.vx[i]) ||
            !std::isfinite(state_.y[i]) || !std::isfinite(state_.vy[i]) ||
            !std::isfinite(state_.z[i]) || !std::isfinite(state_.vz[i]))
            throw SimulationError("non-finite ion state", i, state_.time);
    }
    if (any_dead) rebuild_alive();
}

void Simulator::step() {
    const double dt = config_.timestep;
    const double t = state_.time;
    const std::int64_t n = static_cast<std::int64_t>(alive_.size());

    compute_forces(t);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const std::uint32_t i = alive_[k];
        const double s = 0.5 * dt / state_.ion(i).mass;
        state_.vx[i] += s * fx_[i];
        state_.vy[i] += s * fy_[i];
        state_.vz[i] += s * fz_[i];
        state_.x[i] += dt * state_.vx[i];
        state_.y[i] += dt * state_.vy[i];
        state_.z[i] += dt * state_.vz[i];
    }
    compute_forces(t + dt);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const std::uint32_t i = alive_[k];
        const double s = 0.5 * dt / state_.ion(i).mass;
        state_.vx[i] += s * fx_[i];
        state_.vy[i] += s * fy_[i];
        state_.vz[i] += s * fz_[i];
    }

    dissipative_substep();

    // rf-period velocity average for secular quantities
    if (config_.mode == ForceMode::rf_full) {
        for (const std::uint32_t i : alive_) {
            acc_vx_[i] += state_.vx[i];
            acc_vy_[i] += state_.vy[i];
            acc_vz_[i] += state_.vz[i];
        }
        if (++period_fill_ == steps_per_period_) {
            const double inv = 1.0 / static_cast<double>(steps_per_period_);
            for (const std::uint32_t i : alive_) {
                sec_vx_[i] = acc_vx_[i] * inv;
                sec_vy_[i] = acc_vy_[i] * inv;
                sec_vz_[i] = acc_vz_[i] * inv;
            }
            std::fill(acc_vx_.begin(), acc_vx_.end(), 0.0);
            std::fill(acc_vy_.begin(), acc_vy_.end(), 0.0);
            std::fill(acc_vz_.begin(), acc_vz_.end(), 0.0);
            period_fill_ = 0;
            secular_valid_ = true;
        }
    }

    check_losses();
    state_.time += dt;
    ++state_.step_index;
}

void Simulator::evolve(double duration) {
    static const std::vector<Observer*> none;
    evolve(duration, none);
}

void Simulator::evolve(double duration, const std::vector<Observer*>& observers) {
    if (!(duration > 0)) throw std::invalid_argument("evolve: duration must be > 0");
    const auto steps = static_cast<std::uint64_t>(std::llround(duration / config_.timestep));
    for (std::uint64_t s = 0; s < steps; ++s) {
        for (Observer* ob : observers)
            if (state_.step_index % ob->stride() == 0) ob->sample(*this);
        step();
    }
    for (Observer* ob : observers)
        if (state_.step_index % ob->stride() == 0) ob->sample(*this);
}

Vec3 Simulator::secular_velocity(std::size_t i) const {
    if (config_.mode == ForceMode::rf_full)
        return {sec_vx_[i], sec_vy_[i], sec_vz_[i]};
    return {state_.vx[i], state_.vy[i], state_.vz[i]};
}

bool Simulator::secular_ready() const {
    return config_.mode != ForceMode::rf_full || secular_valid_;
}

std::vector<SpeciesEnergies> Simulator::species_energies() const {
    std::vector<SpeciesEnergies> out(state_.species_table.size());
    for (const std::uint32_t i : alive_) {
        SpeciesEnergies& e = out[state_.species[i]];
        ++e.count;
        const Vec3 v = secular_velocity(i);
        e.kinetic += 0.5 * state_.ion(i).mass * norm2(v);
        e.potential += trap_potential(state_, i, config_, state_.time);
    }
    // half of each pair energy to either partner's species
    for (std::size_t a = 0; a < alive_.size(); ++a) {
        const std::uint32_t i = alive_[a];
        for (std::size_t b = a + 1; b < alive_.size(); ++b) {
            const std::uint32_t j = alive_[b];
            const double dx = state_.x[i] - state_.x[j];
            const double dy = state_.y[i] - state_.y[j];
            const double dz = state_.z[i] - state_.z[j];
            const double u =
                coulomb_k * state_.ion(i).charge * state_.ion(j).charge /
                std::sqrt(dx * dx + dy * dy + dz * dz);
            out[state_.species[i]].potential += 0.5 * u;
            out[state_.species[j]].potential += 0.5 * u;
        }
    }
    for (SpeciesEnergies& e : out)
        if (e.count > 0)
            e.temperature = 2.0 * e.kinetic /
                            (3.0 * k_boltzmann * static_cast<double>(e.count));
    return out;
}

double Simulator::total_energy() const {
    double e = kinetic_energy(state_);
    for (const std::uint32_t i : alive_) e += trap_potential(state_, i, config_, state_.time);
    e += coulomb_energy(state_, alive_);
    return e;
}

}  // namespace iontrap
