#include "iontrap/observers.hpp"

#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

void TemperatureProbe::sample(const Simulator& sim) {
    if (!sim.secular_ready()) return;
    const auto energies = sim.species_energies();
    for (std::uint32_t s = 0; s < energies.size(); ++s) {
        Row r;
        r.t = sim.state().time;
        r.species = s;
        r.count = energies[s].count;
        r.temperature = energies[s].temperature;
        r.e_kin = energies[s].kinetic;
        r.e_pot = energies[s].potential;
        rows_.push_back(r);
    }
}

double TemperatureProbe::last_temperature(std::uint32_t species) const {
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it)
        if (it->species == species) return it->temperature;
    throw std::runtime_error("TemperatureProbe: no sample for species");
}

void TrajectoryProbe::sample(const Simulator& sim) {
    const EnsembleState& s = sim.state();
    if (ids_.empty()) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.alive[i] && (!filter_ || s.species[i] == *filter_))
                ids_.push_back(static_cast<std::uint32_t>(i));
    }
    Frame f;
    f.t = s.time;
    f.pos.reserve(ids_.size());
    for (const std::uint32_t i : ids_) f.pos.push_back(s.position(i));
    frames_.push_back(std::move(f));
}

void VelocityProbe::sample(const Simulator& sim) {
    if (!sim.secular_ready()) return;
    const EnsembleState& s = sim.state();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i] || s.species[i] != species_) continue;
        const Vec3 v = sim.secular_velocity(i);
        samples_.push_back(axis_ == 0 ? v.x : axis_ == 1 ? v.y : v.z);
    }
}

void SecularTemperatureProbe::sample(const Simulator& sim) {
    const EnsembleState& s = sim.state();
    if (sum_v2_.empty()) {
        sum_v2_.assign(s.species_table.size(), 0.0);
        count_.assign(s.species_table.size(), 0);
        mass_.resize(s.species_table.size());
        for (std::size_t k = 0; k < s.species_table.size(); ++k)
            mass_[k] = s.species_table[k].mass;
        rf_mode_ = sim.config().mode == ForceMode::rf_full;
        steps_per_period_ = sim.steps_per_rf_period();
        first_step_ = s.step_index;
    }
    last_step_ = s.step_index;
    if (!sim.secular_ready()) return;
    any_ = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i]) continue;
        sum_v2_[s.species[i]] += norm2(sim.secular_velocity(i));
        ++count_[s.species[i]];
    }
}

std::vector<double> SecularTemperatureProbe::temperatures() const {
    if (!any_) throw std::runtime_error("secular temperature: no samples");
    if (rf_mode_ && last_step_ - first_step_ < 5 * steps_per_period_)
        throw std::runtime_error("secular temperature: window shorter than 5 rf periods");
    std::vector<double> t(sum_v2_.size(), 0.0);
    for (std::size_t s = 0; s < t.size(); ++s)
        if (count_[s] > 0)
            t[s] = mass_[s] * sum_v2_[s] / (3.0 * k_boltzmann * static_cast<double>(count_[s]));
    return t;
}

}  // namespace iontrap
