#include "iontrap/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "iontrap/constants.hpp"
#include "iontrap/fitting.hpp"
#include "iontrap/imaging.hpp"
#include "iontrap/lineshape.hpp"
#include "iontrap/manipulation.hpp"
#include "iontrap/observers.hpp"
#include "iontrap/output.hpp"
#include "iontrap/reactions.hpp"
#include "iontrap/rempd.hpp"
#include "iontrap/simulator.hpp"
#include "iontrap/spectra.hpp"

namespace iontrap {

using namespace constants;

namespace {

PresetLibrary load_presets(const ConfigFile& cfg) {
    if (const ConfigSection* s = cfg.find("scenario"))
        if (s->has("presets")) return PresetLibrary::load(s->get_string("presets"));
    return PresetLibrary::load_default();
}

TrapConfig parse_trap(const ConfigFile& cfg, const PresetLibrary& lib) {
    const ConfigSection& s = cfg.require("trap");
    TrapConfig t;
    if (s.has("preset")) {
        t = TrapConfig::from_preset(lib, s.get_string("preset"));
    } else {
        t.r0 = s.get_double("r0_m");
        t.kappa = s.get_double("kappa_per_m2");
        t.omega_rf = 2 * pi * s.get_double("f_rf_hz");
        t.v_rf = s.get_double("v_rf");
        t.v_ec = s.get_double("v_ec");
    }
    // overrides on top of the preset
    t.v_rf = s.get_double("v_rf", t.v_rf);
    t.v_ec = s.get_double("v_ec", t.v_ec);
    t.v_dc = s.get_double("v_dc", t.v_dc);
    t.v_offset = s.get_double("v_offset", t.v_offset);
    t.validate();
    return t;
}

struct SpeciesSpec {
    IonSpecies ion;
    long count = 0;
    std::string section;
};

std::vector<SpeciesSpec> parse_species(const ConfigFile& cfg, const PresetLibrary& lib) {
    std::vector<SpeciesSpec> out;
    for (const ConfigSection* s : cfg.with_prefix("species.")) {
        SpeciesSpec spec;
        spec.section = s->name;
        const std::string label = s->name.substr(8);
        if (s->has("preset")) {
            spec.ion = lib.ion(s->get_string("preset")).ion;
        } else {
            spec.ion.mass = s->get_double("mass_amu") * atomic_mass_unit;
            spec.ion.charge = s->get_double("charge_e") * elementary_charge;
        }
        spec.ion.name = label;
        if (s->has("role")) {
            const std::string role = s->get_string("role");
            if (role == "laser_cooled")
                spec.ion.role = IonRole::laser_cooled;
            else if (role == "sympathetic")
                spec.ion.role = IonRole::sympathetic;
            else
                throw ConfigError("unknown role '" + role + "'", s->line);
        }
        spec.ion.beta = s->get_double("beta_kg_per_s", spec.ion.beta);
        spec.ion.light_pressure = s->get_double("light_pressure_n", spec.ion.light_pressure);
        spec.count = s->get_long("count", 0);
        spec.ion.validate();
        out.push_back(std::move(spec));
    }
    if (out.empty()) throw ConfigError("no [species.*] sections in " + cfg.path);
    return out;
}

std::uint64_t parse_seed(const ConfigFile& cfg, const RunOptions& options) {
    if (options.seed) return *options.seed;
    const ConfigSection& s = cfg.require("scenario");
    if (!s.has("seed"))
        throw ConfigError("seed is mandatory (set it in [scenario] or pass --seed)", s.line);
    return static_cast<std::uint64_t>(s.get_long("seed"));
}

ForceMode parse_mode(const ConfigFile& cfg) {
    const ConfigSection* s = cfg.find("mode");
    const std::string m = s ? s->get_string("force", "pseudopotential") : "pseudopotential";
    if (m == "pseudopotential") return ForceMode::pseudopotential;
    if (m == "rf_full") return ForceMode::rf_full;
    throw ConfigError("unknown force mode '" + m + "'", s ? s->line : 0);
}

void apply_threads(const RunOptions& options) {
    if (options.threads > 0) omp_set_num_threads(options.threads);
}

// reaction channels named in [reactions], remapped onto the ensemble species
// table (products are appended with zero count)
struct ReactionSetup {
    std::vector<ReactionChannel> channels;
    double stride = 1e-3;
    bool dynamics = true;
    std::map<std::string, double> gas_pressure;  // exposure by gas name

    void apply_pressures() {
        for (auto& ch : channels)
            if (auto* gas = std::get_if<NeutralGas>(&ch.trigger)) {
                const auto it = gas_pressure.find(gas->name);
                gas->pressure = it != gas_pressure.end() ? it->second : 0.0;
            }
    }
    void apply_gate(double fraction) {
        for (auto& ch : channels)
            if (ch.photoactivated) ch.gate = fraction;
    }
};

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

ReactionSetup parse_reactions(const ConfigFile& cfg, const PresetLibrary& lib,
                              std::vector<IonSpecies>& table) {
    ReactionSetup setup;
    const ConfigSection* s = cfg.find("reactions");
    if (!s) return setup;
    const ChannelLibrary chanlib = channel_library(lib);
    auto table_index = [&](const IonSpecies& sp) {
        for (std::size_t i = 0; i < table.size(); ++i)
            if (table[i].name == sp.name) return static_cast<std::uint32_t>(i);
        table.push_back(sp);
        return static_cast<std::uint32_t>(table.size() - 1);
    };
    for (const std::string& name : split_list(s->get_string("channels"))) {
        ReactionChannel ch = chanlib.channel(name);
        ch.reactant = table_index(chanlib.species[ch.reactant]);
        for (auto& b : ch.branches) b.product = table_index(chanlib.species[b.product]);
        setup.channels.push_back(std::move(ch));
    }
    for (const auto& e : s->entries)
        if (e.key.rfind("pressure.", 0) == 0)
            setup.gas_pressure[e.key.substr(9)] = parse_double(e.value, e.line);
    for (auto& ch : setup.channels) {
        if (s->has("fixed_k_m3_s." + ch.name)) {
            ch.rate_model = ReactionChannel::RateModel::fixed;
            ch.fixed_k = s->get_double("fixed_k_m3_s." + ch.name);
        }
    }
    setup.apply_gate(s->get_double("gate", 1.0));
    setup.stride = s->get_double("stride_s", 1e-3);
    setup.dynamics = s->get_bool("dynamics", true);
    setup.apply_pressures();
    return setup;
}

struct ScheduleEvent {
    double t = 0;
    std::vector<std::string> args;
    int line = 0;
};

std::vector<ScheduleEvent> parse_schedule(const ConfigFile& cfg, double& end_time) {
    std::vector<ScheduleEvent> events;
    end_time = 0;
    const ConfigSection* s = cfg.find("schedule");
    if (!s) return events;
    double last_t = 0;
    for (const auto& e : s->entries) {
        if (e.key == "end") {
            end_time = parse_double(e.value, e.line);
            continue;
        }
        if (e.key != "event") throw ConfigError("unknown schedule key '" + e.key + "'", e.line);
        ScheduleEvent ev;
        ev.line = e.line;
        std::istringstream ss(e.value);
        std::string tok;
        if (!(ss >> ev.t)) throw ConfigError("schedule event needs a time", e.line);
        while (ss >> tok) ev.args.push_back(tok);
        if (ev.args.empty()) throw ConfigError("schedule event needs an action", e.line);
        if (ev.t < last_t) throw ConfigError("schedule times must be non-decreasing", e.line);
        last_t = ev.t;
        events.push_back(std::move(ev));
    }
    if (end_time < last_t) end_time = last_t;
    return events;
}

// everything the run subcommand needs in one place
struct Runtime {
    PresetLibrary lib;
    TrapConfig trap;
    std::vector<SpeciesSpec> specs;
    std::vector<IonSpecies> table;  // ensemble table incl. reaction products
    ReactionSetup reactions;
    std::uint64_t seed = 0;
    ForceMode mode = ForceMode::pseudopotential;
    double timestep = 0;
    double init_temperature = 1e-3;
    double relax_time = 0;
    double relax_beta = 2e4;
};

Runtime build_runtime(const ConfigFile& cfg, const RunOptions& options) {
    Runtime rt;
    rt.lib = load_presets(cfg);
    rt.trap = parse_trap(cfg, rt.lib);
    rt.specs = parse_species(cfg, rt.lib);
    rt.seed = parse_seed(cfg, options);
    rt.mode = parse_mode(cfg);
    for (const auto& sp : rt.specs) rt.table.push_back(sp.ion);
    rt.reactions = parse_reactions(cfg, rt.lib, rt.table);
    if (const ConfigSection* s = cfg.find("mode")) rt.timestep = s->get_double("timestep_s", 0.0);
    if (const ConfigSection* s = cfg.find("init")) {
        rt.init_temperature = s->get_double("temperature_k", 1e-3);
        rt.relax_time = s->get_double("relax_time_s", 0.0);
        rt.relax_beta = s->get_double("relax_beta_per_mass", 2e4);
    }
    return rt;
}

Simulator make_simulator(const Runtime& rt, const ConfigFile& cfg) {
    std::vector<SpeciesCount> counts;
    for (std::size_t i = 0; i < rt.table.size(); ++i) {
        const long c = i < rt.specs.size() ? rt.specs[i].count : 0;
        counts.push_back({rt.table[i], c});
    }
    EnsembleState state = init_ensemble(counts, rt.trap, rt.seed, rt.init_temperature);
    ForceConfig fc;
    fc.mode = rt.mode;
    fc.trap = rt.trap;
    fc.timestep = rt.timestep > 0
                      ? rt.timestep
                      : ForceConfig::max_timestep(rt.mode, rt.trap, state.species_table);
    // heating section: initial rates (K/s) by species label
    HeatingModel heating;
    if (const ConfigSection* s = cfg.find("heating")) {
        heating.rate.assign(state.species_table.size(), 0.0);
        for (const auto& e : s->entries) {
            bool found = false;
            for (std::size_t i = 0; i < state.species_table.size(); ++i)
                if (state.species_table[i].name == e.key) {
                    heating.rate[i] = parse_double(e.value, e.line);
                    found = true;
                }
            if (!found) throw ConfigError("heating for unknown species '" + e.key + "'", e.line);
        }
    }
    if (const ConfigSection* s = cfg.find("collisions")) {
        HeatingModel::DiscreteCollisions dc;
        dc.gas = rt.lib.gas(s->get_string("gas"));
        dc.gas.pressure = s->get_double("pressure_pa");
        dc.gas.temperature = s->get_double("temperature_k", 300.0);
        dc.gamma_per_ion = s->get_double("gamma_per_ion");
        heating.collisions = dc;
    }
    Simulator sim(std::move(state), fc, heating);
    if (rt.relax_time > 0) {
        sim.cooling().relax_beta_per_mass = rt.relax_beta;
        sim.evolve(rt.relax_time);
        sim.cooling().relax_beta_per_mass = 0;
        sim.state().time = 0;  // schedule clock starts after the settle
    }
    return sim;
}

std::uint32_t species_by_name(const std::vector<IonSpecies>& table, const std::string& name,
                              int line) {
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i].name == name) return static_cast<std::uint32_t>(i);
    throw ConfigError("unknown species '" + name + "'", line);
}

void write_timeseries_csv(const std::filesystem::path& path, const TemperatureProbe& probe,
                          const std::vector<IonSpecies>& table) {
    CsvWriter csv(path, "t_s,species,N,T_mK,E_kin_J,E_pot_J");
    for (const auto& r : probe.rows()) {
        if (r.count == 0) continue;
        csv.row({format_double(r.t), table[r.species].name, std::to_string(r.count),
                 format_double(r.temperature * 1e3), format_double(r.e_kin),
                 format_double(r.e_pot)});
    }
}

void write_snapshot_csv(const std::filesystem::path& path, const EnsembleState& s) {
    CsvWriter csv(path, "id,species,x_m,y_m,z_m,vx,vy,vz");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i]) continue;
        csv.row({std::to_string(i), s.ion(i).name, format_double(s.x[i]), format_double(s.y[i]),
                 format_double(s.z[i]), format_double(s.vx[i]), format_double(s.vy[i]),
                 format_double(s.vz[i])});
    }
}

void write_escape_csv(const std::filesystem::path& path, const std::vector<EscapeEvent>& events,
                      const std::vector<IonSpecies>& table) {
    CsvWriter csv(path, "t_s,ion_id,species,v_rf");
    for (const auto& e : events)
        csv.row({format_double(e.time), std::to_string(e.ion), table[e.species].name,
                 format_double(e.v_rf)});
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& sp) {
    CsvWriter csv(path, "freq_hz,response");
    for (std::size_t i = 0; i < sp.freq.size(); ++i)
        csv.row({format_double(sp.freq[i]), format_double(sp.response[i])});
}

ImageConfig parse_image_config(const ConfigSection& s) {
    ImageConfig ic;
    ic.view = view_plane_from_string(s.get_string("view", "zy"));
    ic.pixel_size = s.get_double("pixel_size_m");
    ic.width = static_cast<int>(s.get_long("width"));
    ic.height = static_cast<int>(s.get_long("height"));
    ic.exposure = s.get_double("exposure_s");
    ic.psf_sigma = s.get_double("psf_sigma_m", 0.0);
    ic.brightness = s.get_double("brightness", 1.0);
    ic.validate();
    return ic;
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const ConfigFile& cfg) {
    std::vector<Diagnostic> diags;
    auto error = [&](const std::string& msg, int line = 0) {
        diags.push_back({Diagnostic::Severity::error, line, msg});
    };
    auto warn = [&](const std::string& msg, int line = 0) {
        diags.push_back({Diagnostic::Severity::warning, line, msg});
    };
    try {
        const PresetLibrary lib = load_presets(cfg);
        const TrapConfig trap = parse_trap(cfg, lib);
        const std::vector<SpeciesSpec> specs = parse_species(cfg, lib);
        const ConfigSection& sc = cfg.require("scenario");
        if (!sc.has("seed")) error("seed is mandatory in [scenario]", sc.line);
        for (const auto& sp : specs) {
            const double q = mathieu_q(trap, sp.ion);
            if (!mathieu_stable(q)) {
                std::ostringstream msg;
                msg << "species " << sp.ion.name << " is unstable: Mathieu q = " << q
                    << " (>= 0.9)";
                warn(msg.str());
            }
        }
        double end_time = 0;
        const auto events = parse_schedule(cfg, end_time);
        std::vector<IonSpecies> table;
        for (const auto& sp : specs) table.push_back(sp.ion);
        PresetLibrary lib2 = lib;
        std::vector<IonSpecies> full_table = table;
        parse_reactions(cfg, lib2, full_table);
        for (const auto& ev : events) {
            const std::string& verb = ev.args[0];
            if ((verb == "cool" || verb == "heat" || verb == "eject_light") && ev.args.size() > 1) {
                bool known = false;
                for (const auto& sp : full_table)
                    if (sp.name == ev.args[1]) known = true;
                if (!known) error("schedule references unknown species '" + ev.args[1] + "'",
                                  ev.line);
            }
        }
    } catch (const ConfigError& e) {
        error(e.message, e.line);
    } catch (const std::exception& e) {
        error(e.what());
    }
    return diags;
}

namespace {

// applies one schedule action; blocking actions advance the clock themselves
void apply_event(Simulator& sim, Runtime& rt, const ScheduleEvent& ev,
                 std::vector<EscapeEvent>& ramp_log) {
    const std::string& verb = ev.args[0];
    auto need = [&](std::size_t n) {
        if (ev.args.size() < n + 1)
            throw ConfigError("action '" + verb + "' needs " + std::to_string(n) + " arguments",
                              ev.line);
    };
    auto num = [&](std::size_t k) { return parse_double(ev.args[k], ev.line); };
    const std::vector<IonSpecies>& table = sim.state().species_table;

    if (verb == "cool") {
        need(2);
        const std::uint32_t s = species_by_name(table, ev.args[1], ev.line);
        if (sim.cooling().enabled.empty()) sim.cooling().enabled.assign(table.size(), 1);
        sim.cooling().enabled[s] = (ev.args[2] == "on") ? 1 : 0;
    } else if (verb == "heat") {
        need(2);
        const std::uint32_t s = species_by_name(table, ev.args[1], ev.line);
        if (sim.heating().rate.empty()) sim.heating().rate.assign(table.size(), 0.0);
        sim.heating().rate[s] = num(2);
    } else if (verb == "relax") {
        need(1);
        sim.cooling().relax_beta_per_mass = ev.args[1] == "off" ? 0.0 : num(1);
    } else if (verb == "drive") {
        need(1);
        if (ev.args[1] == "off") {
            sim.config().drive.reset();
        } else if (ev.args[1] == "sweep") {
            need(5);
            ExcitationDrive d;
            d.amplitude = num(2);
            d.sweeping = true;
            d.f_start = num(3);
            d.f_end = num(4);
            d.rate = num(5);
            sim.config().drive = d;
        } else {
            need(2);
            ExcitationDrive d;
            d.amplitude = num(1);
            d.frequency = num(2);
            if (ev.args.size() > 5) d.direction = {num(3), num(4), num(5)};
            sim.config().drive = d;
        }
    } else if (verb == "vdc") {
        need(1);
        sim.config().trap.v_dc = num(1);
    } else if (verb == "voffset") {
        need(1);
        sim.config().trap.v_offset = num(1);
    } else if (verb == "ramp") {
        need(2);
        const auto log = ramp_extraction(sim, num(1), num(2));
        ramp_log.insert(ramp_log.end(), log.begin(), log.end());
    } else if (verb == "kick") {
        need(4);
        kick_ion(sim.state(), static_cast<std::size_t>(num(1)), {num(2), num(3), num(4)});
    } else if (verb == "gas") {
        need(2);
        rt.reactions.gas_pressure[ev.args[1]] = num(2);
        rt.reactions.apply_pressures();
        if (sim.heating().collisions && sim.heating().collisions->gas.name == ev.args[1])
            sim.heating().collisions->gas.pressure = num(2);
    } else if (verb == "laser") {
        need(1);
        rt.reactions.apply_gate(num(1));
    } else if (verb == "eject_heavy") {
        need(2);
        eject_heavy(sim, num(1), num(2));
    } else if (verb == "eject_light") {
        need(3);
        const std::uint32_t s = species_by_name(table, ev.args[1], ev.line);
        ExcitationDrive d;
        d.amplitude = num(2);
        eject_light(sim, s, d, num(3));
    } else {
        throw ConfigError("unknown schedule action '" + verb + "'", ev.line);
    }
}

}  // namespace

int run_scenario(const ConfigFile& cfg, const RunOptions& options) {
    apply_threads(options);
    Runtime rt = build_runtime(cfg, options);
    Simulator sim = make_simulator(rt, cfg);

    double end_time = 0;
    const auto events = parse_schedule(cfg, end_time);

    const ConfigSection* out = cfg.find("outputs");
    OutputManifest manifest(options.out_dir);

    const double dt = sim.config().timestep;
    const double ts_stride_s = out ? out->get_double("timeseries_stride_s", 1e-4) : 1e-4;
    TemperatureProbe temp_probe(
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ts_stride_s / dt))));
    std::vector<Observer*> observers;
    if (out && out->has("timeseries")) observers.push_back(&temp_probe);

    std::vector<EscapeEvent> ramp_log;
    std::vector<ReactionEvent> reaction_events;
    struct CompositionRow {
        double t;
        std::uint32_t species;
        std::size_t n;
    };
    std::vector<CompositionRow> composition;
    const bool track_reactions = !rt.reactions.channels.empty();

    auto record_composition = [&]() {
        for (std::uint32_t s = 0; s < sim.state().species_table.size(); ++s)
            composition.push_back({sim.state().time, s, sim.state().count_species(s)});
    };

    // evolve to a target time, stepping reactions at the reaction stride
    auto advance_to = [&](double target) {
        while (sim.state().time < target - 0.5 * dt) {
            double chunk = target - sim.state().time;
            if (track_reactions) chunk = std::min(chunk, rt.reactions.stride);
            if (rt.reactions.dynamics || !track_reactions) {
                sim.evolve(chunk, observers);
            } else {
                sim.state().time += chunk;  // kinetics only
                ++sim.state().step_index;
            }
            if (track_reactions) {
                auto res = step_reactions(sim.state(), chunk, rt.reactions.channels);
                if (!res.events.empty()) sim.refresh();
                for (auto& e : res.events) reaction_events.push_back(std::move(e));
                record_composition();
            }
        }
    };

    if (track_reactions) record_composition();
    for (const auto& ev : events) {
        advance_to(ev.t);
        apply_event(sim, rt, ev, ramp_log);
    }
    if (end_time > sim.state().time) advance_to(end_time);

    // declared outputs
    if (out) {
        if (out->has("timeseries"))
            write_timeseries_csv(manifest.record(out->get_string("timeseries")), temp_probe,
                                 sim.state().species_table);
        if (out->has("snapshot"))
            write_snapshot_csv(manifest.record(out->get_string("snapshot")), sim.state());
        if (out->has("events")) {
            auto all = sim.escapes();
            write_escape_csv(manifest.record(out->get_string("events")), all,
                             sim.state().species_table);
        }
        if (out->has("reactions")) {
            CsvWriter csv(manifest.record(out->get_string("reactions")),
                          "t_s,ion_id,channel,product");
            for (const auto& e : reaction_events)
                csv.row({format_double(e.time), std::to_string(e.ion), e.channel,
                         sim.state().species_table[e.product].name});
        }
        if (out->has("composition")) {
            CsvWriter csv(manifest.record(out->get_string("composition")), "t_s,species,N");
            for (const auto& r : composition)
                csv.row({format_double(r.t), sim.state().species_table[r.species].name,
                         std::to_string(r.n)});
        }
    }
    manifest.write();
    return 0;
}

int run_trap_report(const ConfigFile& cfg, std::ostream& os) {
    const PresetLibrary lib = load_presets(cfg);
    const TrapConfig trap = parse_trap(cfg, lib);
    const auto specs = parse_species(cfg, lib);
    os << "trap: r0 = " << trap.r0 * 1e3 << " mm, f_rf = " << trap.omega_rf / (2 * pi) / 1e6
       << " MHz, V_RF = " << trap.v_rf << " V, V_EC = " << trap.v_ec
       << " V, kappa = " << trap.kappa << " /m^2\n";
    os << "species            q    stable   f_r[kHz]   f_z[kHz]   a[um]    T_cryst[mK]\n";
    for (const auto& sp : specs) {
        const double q = mathieu_q(trap, sp.ion);
        char line[160];
        try {
            const SecularFrequencies f = secular_frequencies(trap, sp.ion);
            const PlasmaEstimate pe = plasma_estimate(trap, sp.ion, 0.01);
            std::snprintf(line, sizeof line, "%-12s %8.4f   %-5s  %9.2f  %9.2f  %7.2f  %9.3f",
                          sp.ion.name.c_str(), q, mathieu_stable(q) ? "yes" : "NO",
                          f.omega_r / (2 * pi) / 1e3, f.omega_z / (2 * pi) / 1e3,
                          pe.spacing * 1e6, pe.t_crystal * 1e3);
            os << line << "\n";
        } catch (const std::domain_error&) {
            std::snprintf(line, sizeof line, "%-12s %8.4f   %-5s  %s", sp.ion.name.c_str(), q,
                          mathieu_stable(q) ? "yes" : "NO", "radially deconfined");
            os << line << "\n";
        }
    }
    if (const ConfigSection* s = cfg.find("collisions")) {
        NeutralGas gas = lib.gas(s->get_string("gas"));
        gas.pressure = s->get_double("pressure_pa");
        gas.temperature = s->get_double("temperature_k", 300.0);
        os << "collision rates against " << gas.name << " at " << gas.pressure << " Pa:\n";
        for (const auto& sp : specs) {
            const CollisionRates cr = collision_rates(sp.ion, 0.0, gas);
            const double kl = langevin_rate(sp.ion, gas);
            char line[200];
            std::snprintf(line, sizeof line,
                          "  %-12s gamma_el = %.3e /s  h_coll = %.3e K/s  <dE> = %.1f K  "
                          "k_L = %.3e m^3/s",
                          sp.ion.name.c_str(), cr.gamma_elastic, cr.h_coll, cr.mean_transfer,
                          kl);
            os << line << "\n";
        }
    }
    return 0;
}

int run_spectrum(const ConfigFile& cfg, const RunOptions& options) {
    apply_threads(options);
    Runtime rt = build_runtime(cfg, options);
    const ConfigSection& s = cfg.require("spectrum");
    Simulator sim = make_simulator(rt, cfg);
    const double equil = s.get_double("equil_time_s", 0.0);
    if (equil > 0) sim.evolve(equil);

    OutputManifest manifest(options.out_dir);
    const std::string method = s.get_string("method", "fft");
    Spectrum sp;
    if (method == "fft") {
        const std::uint32_t target =
            species_by_name(sim.state().species_table, s.get_string("target"), s.line);
        sp = spectrum_fft(sim, target, s.get_double("offset_fraction", 0.05),
                          s.get_double("duration_s"),
                          static_cast<std::size_t>(s.get_long("stride", 16)),
                          s.get_double("min_frequency_hz", 0.0));
    } else if (method == "sweep") {
        SweepPlan plan;
        plan.f_start = s.get_double("f_start_hz");
        plan.f_end = s.get_double("f_end_hz");
        plan.points = static_cast<std::size_t>(s.get_long("points"));
        plan.amplitude = s.get_double("amplitude_v_m");
        plan.settle = s.get_double("settle_s", 0.0);
        plan.dwell = s.get_double("dwell_s");
        const std::uint32_t readout =
            species_by_name(sim.state().species_table, s.get_string("readout"), s.line);
        sp = spectrum_sweep(sim.state(), sim.config(), sim.cooling(), sim.heating(), plan,
                            readout);
    } else {
        throw ConfigError("unknown spectrum method '" + method + "'", s.line);
    }
    write_spectrum_csv(manifest.record(s.get_string("output", "spectrum.csv")), sp);
    CsvWriter peaks(manifest.record(s.get_string("peaks_output", "peaks.csv")),
                    "freq_hz,height,width_hz");
    for (const auto& p : sp.peaks)
        peaks.row({format_double(p.frequency), format_double(p.height), format_double(p.width)});
    peaks.close();
    manifest.write();
    return 0;
}

int run_render(const ConfigFile& cfg, const RunOptions& options) {
    apply_threads(options);
    Runtime rt = build_runtime(cfg, options);
    const ConfigSection& s = cfg.require("render");
    Simulator sim = make_simulator(rt, cfg);
    const double equil = s.get_double("equil_time_s", 0.0);
    if (equil > 0) sim.evolve(equil);

    const ImageConfig ic = parse_image_config(s);
    std::optional<std::uint32_t> filter;
    if (s.has("species"))
        filter = species_by_name(sim.state().species_table, s.get_string("species"), s.line);
    else
        for (std::uint32_t i = 0; i < sim.state().species_table.size(); ++i)
            if (sim.state().species_table[i].role == IonRole::laser_cooled) filter = i;
    if (!filter) throw ConfigError("render: no laser-cooled species to image", s.line);

    const auto stride = static_cast<std::size_t>(s.get_long("stride", 20));
    TrajectoryProbe traj(stride, *filter);
    sim.evolve(ic.exposure, {&traj});
    const CcdImage img = render_ccd(traj, ic, sim.state().species_table[*filter].name);

    OutputManifest manifest(options.out_dir);
    write_pgm16(manifest.record(s.get_string("output", "image.pgm")), img);
    manifest.write();
    return 0;
}

int run_fit(const ConfigFile& cfg, const RunOptions& options) {
    apply_threads(options);
    Runtime rt = build_runtime(cfg, options);
    const ConfigSection& s = cfg.require("fit");
    const CcdImage reference = read_pgm16(s.get_string("reference"));

    FitScenario scenario;
    scenario.trap = rt.trap;
    for (const auto& sp : rt.specs) scenario.species.push_back(sp.ion);
    scenario.seed = rt.seed;
    scenario.relax_time = s.get_double("relax_time_s", 2e-3);
    scenario.relax_beta_per_mass = s.get_double("relax_beta_per_mass", 2e4);
    scenario.equil_time = s.get_double("equil_time_s", 4e-3);
    scenario.render_window = s.get_double("render_window_s", 1e-3);
    scenario.sample_stride = static_cast<std::size_t>(s.get_long("stride", 20));
    scenario.image = reference.config;
    scenario.image.exposure = scenario.render_window;

    std::vector<std::vector<long>> count_grid;
    {
        std::istringstream ss(s.get_string("counts"));
        long n;
        while (ss >> n) {
            std::vector<long> counts;
            for (std::size_t i = 0; i < scenario.species.size(); ++i)
                counts.push_back(i == scenario.lc_index() ? n : rt.specs[i].count);
            count_grid.push_back(counts);
        }
    }
    std::vector<double> h_grid;
    {
        std::istringstream ss(s.get_string("h_lc"));
        double h;
        while (ss >> h) h_grid.push_back(h);
    }

    const StagedFitResult result = fit_counts_and_heating(reference, scenario, count_grid, h_grid);

    OutputManifest manifest(options.out_dir);
    std::ofstream report(manifest.record(s.get_string("output", "fit_report.txt")),
                         std::ios::binary);
    report << "best_count = " << result.best.counts[scenario.lc_index()] << "\n";
    report << "best_h_lc_K_per_s = " << format_double(result.best.h_lc) << "\n";
    report << "best_score = " << format_double(result.best.score) << "\n";
    report << "best_T_lc_K = " << format_double(result.best.temperatures[scenario.lc_index()])
           << "\n";
    report << "evaluations = " << result.evaluated.size() << "\n";
    for (const auto& c : result.evaluated)
        report << "candidate N=" << c.counts[scenario.lc_index()] << " h=" << c.h_lc
               << " score=" << format_double(c.score) << "\n";
    report.close();
    manifest.write();
    return 0;
}

int run_react(const ConfigFile& cfg, const RunOptions& options) {
    apply_threads(options);
    // reuse run_scenario mechanics: [react] is a thin alias that sets a
    // kinetics-only schedule of the requested duration
    return run_scenario(cfg, options);
}

int run_rempd(const ConfigFile& cfg, const RunOptions& options) {
    const ConfigSection& s = cfg.require("rempd");
    const LevelScheme scheme = s.has("scheme") ? LevelScheme::load(s.get_string("scheme"))
                                               : LevelScheme::load_default();
    RadiationEnv env;
    env.t_bbr = s.get_double("t_bbr", 300.0);
    if (s.has("ir")) {
        std::istringstream ss(s.get_string("ir"));
        IrDrive ir;
        std::string kind;
        ss >> ir.from_v >> ir.from_j >> ir.to_v >> ir.to_j >> kind;
        if (kind == "rate")
            ss >> ir.rate;
        else
            throw ConfigError("ir record: expected 'rate <r>'", s.line);
        env.ir = ir;
    }
    if (s.has("uv")) {
        std::istringstream ss(s.get_string("uv"));
        UvField uv;
        ss >> uv.intensity >> uv.wavelength;
        env.uv = uv;
    }
    const double t_rot = s.get_double("t_rot_init", 300.0);
    const double duration = s.get_double("duration_s");

    const auto matrix = build_rate_matrix(scheme, env);
    const auto traj = integrate(boltzmann_populations(scheme, t_rot), matrix,
                                scheme.levels.size(), duration,
                                static_cast<std::size_t>(s.get_long("samples", 400)));

    OutputManifest manifest(options.out_dir);
    {
        std::string header = "t_s";
        for (const auto& l : scheme.levels)
            header += ",p_v" + std::to_string(l.v) + "_J" + std::to_string(l.j);
        header += ",sink";
        CsvWriter csv(manifest.record(s.get_string("populations_output", "populations.csv")),
                      header);
        for (std::size_t k = 0; k < traj.t.size(); ++k) {
            std::vector<std::string> row{format_double(traj.t[k])};
            for (double p : traj.points[k].p) row.push_back(format_double(p));
            row.push_back(format_double(traj.points[k].sink));
            csv.row(row);
        }
    }
    {
        CsvWriter csv(manifest.record(s.get_string("survival_output", "survival.csv")),
                      "t_s,survival");
        for (std::size_t k = 0; k < traj.t.size(); ++k)
            csv.row({format_double(traj.t[k]), format_double(1.0 - traj.points[k].sink)});
    }
    manifest.write();
    return 0;
}

}  // namespace iontrap
