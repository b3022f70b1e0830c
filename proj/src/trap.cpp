#include "iontrap/trap.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

void TrapConfig::validate() const {
    if (!(r0 > 0)) throw std::invalid_argument("trap: r0 must be > 0");
    if (!(omega_rf > 0)) throw std::invalid_argument("trap: omega_rf must be > 0");
    if (!(kappa > 0)) throw std::invalid_argument("trap: kappa must be > 0");
    for (double v : {v_rf, v_ec, v_dc, v_offset})
        if (!std::isfinite(v)) throw std::invalid_argument("trap: non-finite voltage");
}

TrapConfig TrapConfig::from_preset(const PresetLibrary& lib, const std::string& name) {
    const auto it = lib.traps.find(name);
    if (it == lib.traps.end()) throw std::invalid_argument("unknown trap preset: " + name);
    const auto& k = it->second;
    auto get = [&](const char* key) {
        const auto f = k.find(key);
        if (f == k.end())
            throw std::invalid_argument("trap preset '" + name + "' missing key " + key);
        return f->second;
    };
    TrapConfig t;
    t.r0 = get("r0_m");
    t.kappa = get("kappa_per_m2");
    t.omega_rf = 2 * pi * get("f_rf_hz");
    t.v_rf = get("v_rf");
    t.v_ec = get("v_ec");
    auto opt = [&](const char* key) {
        const auto f = k.find(key);
        return f == k.end() ? 0.0 : f->second;
    };
    t.v_dc = opt("v_dc");
    t.v_offset = opt("v_offset");
    t.validate();
    return t;
}

double mathieu_q(const TrapConfig& trap, const IonSpecies& species) {
    trap.validate();
    species.validate();
    return 2 * species.charge * trap.v_rf /
           (species.mass * trap.omega_rf * trap.omega_rf * trap.r0 * trap.r0);
}

SecularFrequencies secular_frequencies(const TrapConfig& trap, const IonSpecies& species) {
    trap.validate();
    species.validate();
    SecularFrequencies f;
    f.omega0 = species.charge * trap.v_rf /
               (std::sqrt(2.0) * species.mass * trap.omega_rf * trap.r0 * trap.r0);
    f.omega_z = std::sqrt(2 * trap.kappa * species.charge * trap.v_ec / species.mass);
    const double wr2 = f.omega0 * f.omega0 - 0.5 * f.omega_z * f.omega_z;
    if (wr2 <= 0) throw std::domain_error("radially deconfined");
    f.omega_r = std::sqrt(wr2);
    return f;
}

double calibrate_v_rf(const TrapConfig& trap, const IonSpecies& species, double omega_r_target) {
    const double wz2 = 2 * trap.kappa * species.charge * trap.v_ec / species.mass;
    const double w02 = omega_r_target * omega_r_target + 0.5 * wz2;
    return std::sqrt(w02) * std::sqrt(2.0) * species.mass * trap.omega_rf * trap.r0 * trap.r0 /
           species.charge;
}

PlasmaEstimate plasma_estimate(const TrapConfig& trap, const IonSpecies& species,
                               double temperature) {
    trap.validate();
    species.validate();
    if (!(temperature > 0)) throw std::invalid_argument("plasma_estimate: temperature must be > 0");
    PlasmaEstimate p;
    p.density = epsilon0 * trap.v_rf * trap.v_rf /
                (species.mass * trap.omega_rf * trap.omega_rf * std::pow(trap.r0, 4));
    p.spacing = std::pow(p.density, -1.0 / 3.0);
    const double coulomb = species.charge * species.charge / (4 * pi * epsilon0 * p.spacing);
    p.gamma = coulomb / (k_boltzmann * temperature);
    p.t_crystal = coulomb / (k_boltzmann * 170.0);
    return p;
}

double radius_ratio(const IonSpecies& inner, const IonSpecies& outer) {
    inner.validate();
    outer.validate();
    const double q1 = std::abs(inner.charge), q2 = std::abs(outer.charge);
    if (inner.mass / q1 > outer.mass / q2 * (1 + 1e-12))
        throw std::invalid_argument("radius_ratio: inner species must have the lower m/Q");
    return std::sqrt(q2 * inner.mass / (q1 * outer.mass));
}

CollisionRates collision_rates(const IonSpecies& ion, double ion_temperature,
                               const NeutralGas& gas) {
    ion.validate();
    gas.validate();
    const double n_n = gas.number_density();
    const double mu = gas.mass * ion.mass / (gas.mass + ion.mass);
    const double alpha = gas.polarizability_si;
    CollisionRates r;
    r.gamma_elastic =
        (2.21 / 4.0) * (elementary_charge / epsilon0) * n_n * std::sqrt(alpha / mu);
    // h_coll carries kB; expressed here in K/s
    r.h_coll = 3.0 * (2.21 / 4.0) * (elementary_charge / epsilon0) * n_n * std::sqrt(alpha * mu) *
               (gas.temperature - ion_temperature) / (gas.mass + ion.mass);
    r.mean_transfer = r.gamma_elastic > 0 ? r.h_coll / r.gamma_elastic : 0.0;
    return r;
}

double langevin_rate(const IonSpecies& ion, const NeutralGas& gas) {
    ion.validate();
    gas.validate();
    const double mu = gas.mass * ion.mass / (gas.mass + ion.mass);
    return std::abs(ion.charge) * std::sqrt(pi * gas.polarizability_volume / (epsilon0 * mu));
}

double equilibrium_temperature(const IonSpecies& species, double heating_rate) {
    species.validate();
    if (heating_rate < 0) throw std::invalid_argument("heating rate must be >= 0");
    if (species.beta == 0)
        return heating_rate == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return heating_rate * species.mass / species.beta;
}

EnergyBalance energy_balance(std::span<const SpeciesRateRow> rows) {
    int lc = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        r.species.validate();
        if (r.count < 0) throw std::invalid_argument("energy_balance: count must be >= 0");
        if (r.temperature < 0) throw std::invalid_argument("energy_balance: temperature must be >= 0");
        if (r.species.role == IonRole::laser_cooled) {
            if (lc >= 0) throw std::invalid_argument("energy_balance: multiple laser-cooled rows");
            lc = static_cast<int>(i);
        }
    }
    if (lc < 0) throw std::invalid_argument("energy_balance: no laser-cooled row");

    EnergyBalance out;
    const SpeciesRateRow& lcr = rows[lc];
    const double beta_per_mass = lcr.species.beta / lcr.species.mass;
    out.lc_cooling_rate = -beta_per_mass * lcr.temperature;

    double heat_total = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const double c = (static_cast<int>(i) == lc) ? out.lc_cooling_rate : 0.0;
        out.residual += (c + rows[i].heating_rate) * static_cast<double>(rows[i].count);
        out.gross_cooling += std::abs(c) * static_cast<double>(rows[i].count);
        heat_total += rows[i].heating_rate * static_cast<double>(rows[i].count);
    }
    if (lcr.count > 0 && beta_per_mass > 0)
        out.lc_temperature_predicted = heat_total / (static_cast<double>(lcr.count) * beta_per_mass);
    return out;
}

double common_heating_rate(double beta_per_mass, double t_lc0, long n_lc0, long n_sc20) {
    return beta_per_mass * t_lc0 * static_cast<double>(n_lc0) /
           static_cast<double>(n_lc0 + n_sc20);
}

}  // namespace iontrap
