#include "iontrap/reactions.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/constants.hpp"
#include "iontrap/rng.hpp"
#include "iontrap/trap.hpp"

namespace iontrap {

using namespace constants;

void ReactionChannel::validate() const {
    if (!destructive) {
        double sum = 0;
        for (const auto& b : branches) sum += b.fraction;
        if (branches.empty() || std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("channel '" + name + "': branching must sum to 1");
    }
    if (gate < 0 || gate > 1)
        throw std::invalid_argument("channel '" + name + "': gate must be in [0,1]");
    if (rate_model == RateModel::fixed && !(fixed_k > 0))
        throw std::invalid_argument("channel '" + name + "': fixed rate requires k > 0");
}

double channel_rate(const ReactionChannel& channel, std::span<const IonSpecies> table) {
    channel.validate();
    if (const auto* gas = std::get_if<NeutralGas>(&channel.trigger)) {
        if (gas->pressure == 0) return 0.0;
        const double k = channel.rate_model == ReactionChannel::RateModel::fixed
                             ? channel.fixed_k
                             : langevin_rate(table[channel.reactant], *gas);
        return channel.gate * k * gas->number_density();
    }
    const auto& ph = std::get<PhotonField>(channel.trigger);
    if (ph.intensity == 0) return 0.0;
    if (!(ph.wavelength > 0)) throw std::invalid_argument("photon trigger needs a wavelength");
    const double photon_energy = planck_h * speed_of_light / ph.wavelength;
    return channel.gate * ph.cross_section * ph.intensity / photon_energy;
}

ReactionStepResult step_reactions(EnsembleState& state, double dt,
                                  std::span<const ReactionChannel> channels) {
    ReactionStepResult result;
    if (channels.empty()) return result;

    // per-species cumulative channel rates
    std::vector<std::vector<std::pair<double, const ReactionChannel*>>> per_species(
        state.species_table.size());
    double max_rate = 0;
    for (const ReactionChannel& ch : channels) {
        const double r = channel_rate(ch, state.species_table);
        if (r <= 0) continue;
        auto& list = per_species[ch.reactant];
        const double base = list.empty() ? 0.0 : list.back().first;
        list.push_back({base + r, &ch});
        max_rate = std::max(max_rate, base + r);
    }
    result.rate_warning = max_rate * dt > 0.1;

    const std::uint64_t step = state.step_index;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i]) continue;
        const auto& list = per_species[state.species[i]];
        if (list.empty()) continue;
        const double total = list.back().first;
        const double u = rng_uniform(state.seed, RngStream::reaction_fire, step, i);
        if (u >= total * dt) continue;

        // pick the channel by rate share
        const double pick = u / dt;
        const ReactionChannel* ch = list.back().second;
        for (const auto& [cum, c] : list)
            if (pick < cum) {
                ch = c;
                break;
            }

        ReactionEvent ev;
        ev.time = state.time;
        ev.ion = static_cast<std::uint32_t>(i);
        ev.channel = ch->name;

        if (ch->destructive) {
            state.alive[i] = 0;
            ev.product = state.species[i];
            result.events.push_back(std::move(ev));
            continue;
        }

        // branch choice
        const double ub = rng_uniform(state.seed, RngStream::reaction_branch, step, i);
        double acc = 0;
        const ReactionBranch* branch = &ch->branches.back();
        for (const auto& b : ch->branches) {
            acc += b.fraction;
            if (ub < acc) {
                branch = &b;
                break;
            }
        }
        const std::uint32_t product = branch->product;
        if (product >= state.species_table.size())
            throw std::invalid_argument("reaction '" + ch->name + "': unknown product species");
        ev.product = product;

        // species swap in place, then recoil: (product ion + byproduct) share
        // the released energy in the frame moving with the pre-event ion
        // momentum; the light byproduct carries most of it.
        state.set_species(i, product);
        const double m_ion = state.species_table[product].mass;
        const double m_b = branch->byproduct_mass > 0 ? branch->byproduct_mass : ch->byproduct_mass;
        if (m_b > 0) {
            const double m_pre = state.species_table[ch->reactant].mass;
            const Vec3 v_pre = state.velocity(i);
            const Vec3 w = (m_pre / (m_ion + m_b)) * v_pre;
            const double mu = m_ion * m_b / (m_ion + m_b);
            const double p = std::sqrt(2.0 * mu * std::max(0.0, ch->exothermicity));
            const Vec3 dir = rng_unit_vector(state.seed, RngStream::reaction_recoil, step, i);
            state.vx[i] = w.x + p * dir.x / m_ion;
            state.vy[i] = w.y + p * dir.y / m_ion;
            state.vz[i] = w.z + p * dir.z / m_ion;
            ev.byproduct_mass = m_b;
            ev.byproduct_velocity = w - (p / m_b) * dir;
        }
        result.events.push_back(std::move(ev));
    }
    return result;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> n, double n_n) {
    if (t.size() != n.size() || t.size() < 5)
        throw std::invalid_argument("fit_decay: need >= 5 points");
    // log-linear least squares over positive counts
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(n[i] > 0)) continue;
        const double y = std::log(n[i]);
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
        ++m;
    }
    if (m < 5) throw std::invalid_argument("fit_decay: need >= 5 positive counts");
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    DecayFit fit;
    const double slope = denom != 0 ? (static_cast<double>(m) * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / static_cast<double>(m);
    fit.gamma = -slope;
    fit.k = n_n > 0 ? fit.gamma / n_n : 0.0;
    double r2 = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(n[i] > 0)) continue;
        const double d = std::log(n[i]) - (intercept + slope * t[i]);
        r2 += d * d;
    }
    fit.residual = std::sqrt(r2 / static_cast<double>(m));
    return fit;
}

std::uint32_t ChannelLibrary::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i].name == name) return static_cast<std::uint32_t>(i);
    throw std::invalid_argument("channel library: unknown species " + name);
}

const ReactionChannel& ChannelLibrary::channel(const std::string& name) const {
    for (const auto& c : channels)
        if (c.name == name) return c;
    throw std::invalid_argument("channel library: unknown channel " + name);
}

ReactionChannel& ChannelLibrary::channel(const std::string& name) {
    for (auto& c : channels)
        if (c.name == name) return c;
    throw std::invalid_argument("channel library: unknown channel " + name);
}

ChannelLibrary channel_library(const PresetLibrary& presets) {
    ChannelLibrary lib;
    auto add_species = [&](const std::string& name) {
        for (std::size_t i = 0; i < lib.species.size(); ++i)
            if (lib.species[i].name == name) return static_cast<std::uint32_t>(i);
        lib.species.push_back(presets.ion(name).ion);
        return static_cast<std::uint32_t>(lib.species.size() - 1);
    };

    struct Def {
        const char* name;
        const char* reactant;
        const char* gas;
        std::vector<std::pair<const char*, double>> products;
        double byproduct_amu;
        double exo_k;  // exothermicity in kB K; 0 where unspecified or thermoneutral
        bool photoactivated;
    };
    // the Be+* channels do not proceed from the electronic ground state; the
    // gate carries the P-state fraction and drops to 0 with the laser off
    const std::vector<Def> defs = {
        {"Be+H2", "Be+", "H2", {{"BeH+", 1.0}}, 1.007825, 0, true},
        {"Be+HD", "Be+", "HD", {{"BeH+", 0.5}, {"BeD+", 0.5}}, 0, 0, true},
        {"Be+D2", "Be+", "D2", {{"BeD+", 1.0}}, 2.014102, 0, true},
        {"Ba+CO2", "Ba+", "CO2", {{"BaO+", 1.0}}, 28.0, 0, false},
        {"H2+H2", "H2+", "H2", {{"H3+", 1.0}}, 1.007825, 0, false},
        {"H3+HD", "H3+", "HD", {{"H2D+", 1.0}}, 2.015650, 232.0, false},
        {"H2D+H2", "H2D+", "H2", {{"H3+", 1.0}}, 3.021927, 0, false},
        {"Ar+H2", "Ar+", "H2", {{"ArH+", 1.0}}, 1.007825, 0, false},
        {"ArH+H2", "ArH+", "H2", {{"H3+", 1.0}}, 39.948, 0, false},
        {"H2+Ar", "H2+", "Ar", {{"ArH+", 1.0}}, 1.007825, 0, false},
        {"H3+O2", "H3+", "O2", {{"HO2+", 1.0}}, 2.015650, 0, false},  // nearly thermoneutral
    };
    for (const auto& d : defs) {
        ReactionChannel ch;
        ch.name = d.name;
        ch.reactant = add_species(d.reactant);
        ch.trigger = presets.gas(d.gas);
        ch.photoactivated = d.photoactivated;
        for (const auto& [p, f] : d.products) ch.branches.push_back({add_species(p), f, 0.0});
        ch.byproduct_mass = d.byproduct_amu * atomic_mass_unit;
        ch.exothermicity = d.exo_k * k_boltzmann;
        lib.channels.push_back(std::move(ch));
    }
    {
        // isotope branches leave different neutrals behind
        ReactionChannel& behd = lib.channel("Be+HD");
        behd.branches[0].byproduct_mass = 2.014102 * atomic_mass_unit;  // BeH+ + D
        behd.branches[1].byproduct_mass = 1.007825 * atomic_mass_unit;  // BeD+ + H
    }

    // generic photon-driven destruction standing in for dye fragmentation
    ReactionChannel photo;
    photo.name = "photodestruction";
    photo.reactant = add_species("AF+");
    photo.trigger = PhotonField{0.0, 1e-21, 493e-9};
    photo.destructive = true;
    lib.channels.push_back(std::move(photo));

    return lib;
}

}  // namespace iontrap
