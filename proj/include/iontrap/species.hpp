#pragma once

#include <map>
#include <string>
#include <vector>

namespace iontrap {

enum class IonRole { laser_cooled, sympathetic };

struct IonSpecies {
    std::string name;
    double mass = 0;    // kg
    double charge = 0;  // C, integer multiple of e
    IonRole role = IonRole::sympathetic;
    double beta = 0;            // kg/s, laser-cooling friction coefficient
    double light_pressure = 0;  // N, constant axial force on laser-cooled ions

    void validate() const;  // throws std::invalid_argument
};

struct NeutralGas {
    std::string name;
    double mass = 0;                   // kg
    double polarizability_si = 0;      // C m^2/V  (= 4 pi eps0 * alpha_volume)
    double polarizability_volume = 0;  // m^3
    double pressure = 0;               // Pa
    double temperature = 300;          // K

    double number_density() const;  // p / (kB T), 1/m^3
    void validate() const;
};

// gas from polarizability volume; the SI polarizability follows from it
NeutralGas make_gas(const std::string& name, double mass_kg, double alpha_volume_m3,
                    double pressure_pa = 0, double temperature_k = 300);

struct IonPreset {
    IonSpecies ion;
    double transition_wavelength = 0;   // m, cooling transition (laser-cooled species)
    double natural_linewidth_hz = 0;    // FWHM
};

struct TrapPreset;  // defined in trap.hpp

// Species, gas, and trap presets loaded from the data file (see data/presets.cfg).
struct PresetLibrary {
    std::map<std::string, IonPreset> ions;
    std::map<std::string, NeutralGas> gases;
    std::map<std::string, std::map<std::string, double>> traps;  // raw keys, see trap.hpp

    const IonPreset& ion(const std::string& name) const;
    const NeutralGas& gas(const std::string& name) const;

    static PresetLibrary load(const std::string& path);
    static PresetLibrary load_default();  // data/presets.cfg from the source tree
};

}  // namespace iontrap
