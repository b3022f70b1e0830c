#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iontrap/ensemble.hpp"
#include "iontrap/species.hpp"

namespace iontrap {

struct PhotonField {
    double intensity = 0;      // W/m^2
    double cross_section = 0;  // m^2
    double wavelength = 0;     // m
};

struct ReactionBranch {
    std::uint32_t product = 0;  // species index
    double fraction = 0;
    double byproduct_mass = 0;  // kg; 0 = use the channel default
};

struct ReactionChannel {
    std::string name;
    std::uint32_t reactant = 0;  // species index
    std::variant<NeutralGas, PhotonField> trigger;
    double gate = 1.0;          // excited-state fraction for photoactivated channels
    bool photoactivated = false;  // requires the cooling laser (Be+* chemistry)
    std::vector<ReactionBranch> branches;  // fractions sum to 1
    double byproduct_mass = 0;             // kg, neutral leaving the event
    bool destructive = false;              // photodestruction: ion removed
    enum class RateModel { langevin, fixed } rate_model = RateModel::langevin;
    double fixed_k = 0;       // m^3/s
    double exothermicity = 0; // J released into product + byproduct recoil

    void validate() const;
};

struct ReactionEvent {
    double time = 0;
    std::uint32_t ion = 0;
    std::string channel;
    std::uint32_t product = 0;
    double byproduct_mass = 0;  // kg
    Vec3 byproduct_velocity;    // lab frame
};

// per-ion rate: neutral trigger gate * k * n_n; photon trigger gate * sigma * I/(h c / lambda)
double channel_rate(const ReactionChannel& channel, std::span<const IonSpecies> table);

// dt-binned Bernoulli sampling of first-order kinetics; fires at most one
// event per ion per call, swaps the species in place and applies the
// momentum-conserving recoil (byproduct takes m_ion/(m_ion + m_b) of the
// released energy). Warns via return flag when dt * max rate > 0.1.
struct ReactionStepResult {
    std::vector<ReactionEvent> events;
    bool rate_warning = false;
};
ReactionStepResult step_reactions(EnsembleState& state, double dt,
                                  std::span<const ReactionChannel> channels);

struct DecayFit {
    double gamma = 0;     // 1/s
    double k = 0;         // m^3/s
    double residual = 0;  // rms of ln-space fit
};

// least-squares exponential fit N(t) = N0 exp(-Gamma t); k = Gamma / n_n
DecayFit fit_decay(std::span<const double> t, std::span<const double> n, double n_n);

// Named preset channels (Langevin-rate chemistry of the hydrogen/argon/
// barium systems plus a generic photodestruction channel). Species indices
// refer to the returned species table.
struct ChannelLibrary {
    std::vector<IonSpecies> species;
    std::vector<ReactionChannel> channels;

    std::uint32_t species_index(const std::string& name) const;
    const ReactionChannel& channel(const std::string& name) const;
    ReactionChannel& channel(const std::string& name);
};
ChannelLibrary channel_library(const PresetLibrary& presets);

}  // namespace iontrap
