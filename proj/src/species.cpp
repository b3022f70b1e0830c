#include "iontrap/species.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/config.hpp"
#include "iontrap/constants.hpp"

#ifndef IONTRAP_DATA_DIR
#define IONTRAP_DATA_DIR "data"
#endif

namespace iontrap {

using namespace constants;

void IonSpecies::validate() const {
    if (!(mass > 0)) throw std::invalid_argument("ion '" + name + "': mass must be > 0");
    if (charge == 0) throw std::invalid_argument("ion '" + name + "': charge must be nonzero");
    if (beta < 0) throw std::invalid_argument("ion '" + name + "': beta must be >= 0");
    if (!std::isfinite(mass) || !std::isfinite(charge) || !std::isfinite(beta))
        throw std::invalid_argument("ion '" + name + "': non-finite parameter");
}

double NeutralGas::number_density() const {
    return pressure / (k_boltzmann * temperature);
}

void NeutralGas::validate() const {
    if (!(mass > 0)) throw std::invalid_argument("gas '" + name + "': mass must be > 0");
    if (!(polarizability_si > 0) || !(polarizability_volume > 0))
        throw std::invalid_argument("gas '" + name + "': polarizability must be > 0");
    const double expected = 4 * pi * epsilon0 * polarizability_volume;
    if (std::abs(polarizability_si - expected) > 1e-6 * expected)
        throw std::invalid_argument("gas '" + name +
                                    "': polarizability_si != 4 pi eps0 * polarizability_volume");
    if (pressure < 0) throw std::invalid_argument("gas '" + name + "': pressure must be >= 0");
    if (!(temperature > 0)) throw std::invalid_argument("gas '" + name + "': temperature must be > 0");
}

NeutralGas make_gas(const std::string& name, double mass_kg, double alpha_volume_m3,
                    double pressure_pa, double temperature_k) {
    NeutralGas g;
    g.name = name;
    g.mass = mass_kg;
    g.polarizability_volume = alpha_volume_m3;
    g.polarizability_si = 4 * pi * epsilon0 * alpha_volume_m3;
    g.pressure = pressure_pa;
    g.temperature = temperature_k;
    g.validate();
    return g;
}

const IonPreset& PresetLibrary::ion(const std::string& name) const {
    const auto it = ions.find(name);
    if (it == ions.end()) throw std::invalid_argument("unknown ion preset: " + name);
    return it->second;
}

const NeutralGas& PresetLibrary::gas(const std::string& name) const {
    const auto it = gases.find(name);
    if (it == gases.end()) throw std::invalid_argument("unknown gas preset: " + name);
    return it->second;
}

PresetLibrary PresetLibrary::load(const std::string& path) {
    const ConfigFile cfg = ConfigFile::parse_file(path);
    PresetLibrary lib;
    for (const ConfigSection* s : cfg.with_prefix("ion.")) {
        IonPreset p;
        p.ion.name = s->name.substr(4);
        p.ion.mass = s->get_double("mass_amu") * atomic_mass_unit;
        p.ion.charge = s->get_double("charge_e") * elementary_charge;
        const std::string role = s->get_string("role", "sympathetic");
        if (role == "laser_cooled")
            p.ion.role = IonRole::laser_cooled;
        else if (role == "sympathetic")
            p.ion.role = IonRole::sympathetic;
        else
            throw ConfigError("unknown role '" + role + "' in [" + s->name + "]", s->line);
        p.ion.beta = s->get_double("beta_kg_per_s", 0.0);
        p.ion.light_pressure = s->get_double("light_pressure_n", 0.0);
        p.transition_wavelength = s->get_double("wavelength_nm", 0.0) * 1e-9;
        p.natural_linewidth_hz = s->get_double("linewidth_mhz", 0.0) * 1e6;
        p.ion.validate();
        lib.ions.emplace(p.ion.name, std::move(p));
    }
    for (const ConfigSection* s : cfg.with_prefix("gas.")) {
        const std::string name = s->name.substr(4);
        NeutralGas g = make_gas(name, s->get_double("mass_amu") * atomic_mass_unit,
                                s->get_double("alpha_volume_a3") * 1e-30);
        lib.gases.emplace(name, std::move(g));
    }
    for (const ConfigSection* s : cfg.with_prefix("trap.")) {
        std::map<std::string, double> keys;
        for (const auto& e : s->entries) keys[e.key] = parse_double(e.value, e.line);
        lib.traps.emplace(s->name.substr(5), std::move(keys));
    }
    return lib;
}

PresetLibrary PresetLibrary::load_default() {
    return load(std::string(IONTRAP_DATA_DIR) + "/presets.cfg");
}

}  // namespace iontrap
