#pragma once

#include <vector>

#include "iontrap/simulator.hpp"

namespace iontrap {

// Destructive mass spectrometry: lower V_RF with a finite static offset so
// trajectories turn unstable; heavy and hot ions escape first. The ramp is
// linear, the escape log carries the drive amplitude at loss.
std::vector<EscapeEvent> ramp_extraction(Simulator& sim, double v_rf_end, double duration);

struct RemovalReport {
    std::vector<std::size_t> before;  // alive per species
    std::vector<std::size_t> after;
    std::string warning;  // e.g. drive overlapping a non-target resonance
    double retention(std::uint32_t s) const {
        return before[s] ? static_cast<double>(after[s]) / static_cast<double>(before[s]) : 1.0;
    }
};

// Static quadrupole V_DC destabilizes one radial direction for species above
// an m/Q threshold; the lighter core stays.
RemovalReport eject_heavy(Simulator& sim, double v_dc, double duration);

// Resonant secular excitation of one species, cooling off (gas state).
// Drive frequency defaults to the target's single-particle radial frequency.
RemovalReport eject_light(Simulator& sim, std::uint32_t target_species, ExcitationDrive drive,
                          double duration, bool cooling_off = true);

// single-particle V_DC instability threshold for a species in this trap
double vdc_instability_threshold(const TrapConfig& trap, const IonSpecies& species);

}  // namespace iontrap
