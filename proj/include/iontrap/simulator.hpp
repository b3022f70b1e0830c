#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "iontrap/ensemble.hpp"
#include "iontrap/forces.hpp"

namespace iontrap {

// Uniform heating as frequent small velocity kicks, optional discrete
// ion-neutral collision events, optional pressure-independent kick floor.
struct HeatingModel {
    std::vector<double> rate;  // K/s per species; empty = no uniform heating

    struct DiscreteCollisions {
        NeutralGas gas;
        double gamma_per_ion = 0;  // 1/s
    };
    std::optional<DiscreteCollisions> collisions;

    double kick_floor = 0;  // m/s, extra per-step kick sigma (all species)

    double rate_for(std::uint32_t species) const {
        return species < rate.size() ? rate[species] : 0.0;
    }
};

struct CoolingConfig {
    std::vector<std::uint8_t> enabled;  // per species; empty = every LC species active
    // artificial isotropic friction on all species, used to settle crystals
    double relax_beta_per_mass = 0;  // 1/s

    bool laser_on(const IonSpecies& sp, std::uint32_t index) const {
        if (sp.role != IonRole::laser_cooled) return false;
        return enabled.empty() || (index < enabled.size() && enabled[index]);
    }
};

struct SimulationError : std::runtime_error {
    std::size_t ion;
    double time;
    SimulationError(const std::string& msg, std::size_t i, double t)
        : std::runtime_error(msg), ion(i), time(t) {}
};

struct EscapeEvent {
    double time = 0;
    std::uint32_t ion = 0;
    std::uint32_t species = 0;
    double v_rf = 0;  // drive amplitude at escape
};

struct SpeciesEnergies {
    std::size_t count = 0;
    double kinetic = 0;    // J, secular kinetic (rf mode: micromotion removed)
    double potential = 0;  // J, trap + half of pair energy
    double temperature = 0;  // K, from secular kinetic energy
};

class Simulator;

class Observer {
public:
    virtual ~Observer() = default;
    virtual std::size_t stride() const = 0;  // in steps
    virtual void sample(const Simulator& sim) = 0;
};

// Velocity-Verlet integration of the conservative forces; friction, light
// pressure, stochastic kicks and collision events applied in a split substep.
// All randomness is counter-based on (seed, step, ion), so trajectories are
// reproducible for any thread count.
class Simulator {
public:
    Simulator(EnsembleState state, ForceConfig config, HeatingModel heating = {});

    EnsembleState& state() { return state_; }
    const EnsembleState& state() const { return state_; }
    ForceConfig& config() { return config_; }
    const ForceConfig& config() const { return config_; }
    CoolingConfig& cooling() { return cooling_; }
    HeatingModel& heating() { return heating_; }

    void step();
    void evolve(double duration);
    void evolve(double duration, const std::vector<Observer*>& observers);

    // rebuild internal tables after external changes (species swaps, kills)
    void refresh();

    // rf mode: velocity averaged over the last completed rf period;
    // pseudopotential mode: instantaneous velocity
    Vec3 secular_velocity(std::size_t i) const;
    bool secular_ready() const;
    std::size_t steps_per_rf_period() const { return steps_per_period_; }

    std::vector<SpeciesEnergies> species_energies() const;
    double total_energy() const;  // kinetic + trap + Coulomb, alive ions

    const std::vector<EscapeEvent>& escapes() const { return escapes_; }
    const std::vector<std::uint32_t>& alive_index() const { return alive_; }

private:
    void compute_forces(double t);
    void dissipative_substep();
    void check_losses();
    void rebuild_alive();

    EnsembleState state_;
    ForceConfig config_;
    CoolingConfig cooling_;
    HeatingModel heating_;

    std::vector<std::uint32_t> alive_;
    std::vector<double> fx_, fy_, fz_;
    std::vector<EscapeEvent> escapes_;

    // rf-period velocity averaging
    std::size_t steps_per_period_ = 0;
    std::size_t period_fill_ = 0;
    bool secular_valid_ = false;
    std::vector<double> acc_vx_, acc_vy_, acc_vz_;
    std::vector<double> sec_vx_, sec_vy_, sec_vz_;
};

}  // namespace iontrap
