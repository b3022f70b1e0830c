#include "iontrap/manipulation.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

std::vector<EscapeEvent> ramp_extraction(Simulator& sim, double v_rf_end, double duration) {
    TrapConfig& trap = sim.config().trap;
    if (sim.config().trap.v_offset == 0 && sim.config().trap.v_dc == 0)
        throw std::invalid_argument("ramp_extraction: needs a nonzero static quadrupole offset");
    if (!(v_rf_end < trap.v_rf))
        throw std::invalid_argument("ramp_extraction: ramp must decrease V_RF");
    const double v0 = trap.v_rf;
    const double dt = sim.config().timestep;
    const auto steps = static_cast<std::uint64_t>(std::llround(duration / dt));
    const std::size_t mark = sim.escapes().size();
    for (std::uint64_t s = 0; s < steps; ++s) {
        trap.v_rf = v0 + (v_rf_end - v0) * (static_cast<double>(s) / static_cast<double>(steps));
        sim.step();
        if (sim.alive_index().empty()) break;
    }
    trap.v_rf = v_rf_end;
    return {sim.escapes().begin() + static_cast<std::ptrdiff_t>(mark), sim.escapes().end()};
}

static std::vector<std::size_t> census(const EnsembleState& s) {
    std::vector<std::size_t> n(s.species_table.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.alive[i]) ++n[s.species[i]];
    return n;
}

RemovalReport eject_heavy(Simulator& sim, double v_dc, double duration) {
    RemovalReport report;
    report.before = census(sim.state());
    const double v_dc_prev = sim.config().trap.v_dc;
    sim.config().trap.v_dc = v_dc;
    sim.evolve(duration);
    sim.config().trap.v_dc = v_dc_prev;
    report.after = census(sim.state());
    return report;
}

RemovalReport eject_light(Simulator& sim, std::uint32_t target_species, ExcitationDrive drive,
                          double duration, bool cooling_off) {
    RemovalReport report;
    report.before = census(sim.state());
    if (drive.frequency <= 0 && !drive.sweeping) {
        const SecularFrequencies f = secular_frequencies(
            sim.config().trap, sim.state().species_table.at(target_species));
        drive.frequency = f.omega_r / (2 * pi);
    }
    // warn-level check: drive within 10% of a non-target species' resonance
    for (std::uint32_t s = 0; s < sim.state().species_table.size(); ++s) {
        if (s == target_species) continue;
        try {
            const SecularFrequencies f =
                secular_frequencies(sim.config().trap, sim.state().species_table[s]);
            const double fr = f.omega_r / (2 * pi);
            if (std::abs(fr - drive.frequency) < 0.1 * fr)
                report.warning = "drive close to resonance of " +
                                 sim.state().species_table[s].name;
        } catch (const std::domain_error&) {
        }
    }
    CoolingConfig saved = sim.cooling();
    if (cooling_off) {
        sim.cooling().enabled.assign(sim.state().species_table.size(), 0);
        sim.cooling().relax_beta_per_mass = 0;
    }
    auto& cfg_drive = sim.config().drive;
    const auto saved_drive = cfg_drive;
    cfg_drive = drive;
    sim.evolve(duration);
    cfg_drive = saved_drive;
    sim.cooling() = saved;
    report.after = census(sim.state());
    return report;
}

double vdc_instability_threshold(const TrapConfig& trap, const IonSpecies& species) {
    const SecularFrequencies f = secular_frequencies(trap, species);
    return species.mass * f.omega_r * f.omega_r * trap.r0 * trap.r0 / species.charge;
}

}  // namespace iontrap
