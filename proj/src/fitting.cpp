#include "iontrap/fitting.hpp"

#include <cmath>
#include <stdexcept>

#include "iontrap/observers.hpp"

namespace iontrap {

std::uint32_t FitScenario::lc_index() const {
    int found = -1;
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i].role == IonRole::laser_cooled) {
            if (found >= 0) throw std::invalid_argument("fit: multiple laser-cooled species");
            found = static_cast<int>(i);
        }
    if (found < 0) throw std::invalid_argument("fit: no laser-cooled species");
    return static_cast<std::uint32_t>(found);
}

CandidateResult simulate_candidate(const FitScenario& scenario, const std::vector<long>& counts,
                                   const std::vector<double>& heating) {
    if (counts.size() != scenario.species.size())
        throw std::invalid_argument("fit: counts/species size mismatch");
    std::vector<SpeciesCount> sc;
    for (std::size_t i = 0; i < counts.size(); ++i)
        sc.push_back({scenario.species[i], counts[i]});

    EnsembleState state = init_ensemble(sc, scenario.trap, scenario.seed, 1e-3);
    ForceConfig cfg;
    cfg.mode = ForceMode::pseudopotential;
    cfg.trap = scenario.trap;
    cfg.timestep = scenario.timestep > 0
                       ? scenario.timestep
                       : ForceConfig::max_timestep(cfg.mode, cfg.trap, state.species_table);
    Simulator sim(std::move(state), cfg);

    sim.cooling().relax_beta_per_mass = scenario.relax_beta_per_mass;
    sim.evolve(scenario.relax_time);
    sim.cooling().relax_beta_per_mass = 0;

    sim.heating().rate = heating;
    sim.evolve(scenario.equil_time);

    const std::uint32_t lc = scenario.lc_index();
    TrajectoryProbe traj(scenario.sample_stride, lc);
    SecularTemperatureProbe temps(scenario.sample_stride);
    sim.evolve(scenario.render_window, {&traj, &temps});

    CandidateResult out;
    out.image = render_ccd(traj, scenario.image, scenario.species[lc].name);
    out.temperatures = temps.temperatures();
    return out;
}

namespace {

void check_reference(const CcdImage& reference, const FitScenario& scenario) {
    if (reference.width != scenario.image.width || reference.height != scenario.image.height ||
        std::abs(reference.config.pixel_size - scenario.image.pixel_size) >
            1e-12 * scenario.image.pixel_size)
        throw std::invalid_argument("fit: reference/render config mismatch");
}

}  // namespace

StagedFitResult fit_counts_and_heating(const CcdImage& reference, const FitScenario& scenario,
                                       const std::vector<std::vector<long>>& count_grid,
                                       const std::vector<double>& h_lc_grid) {
    check_reference(reference, scenario);
    if (count_grid.empty() || h_lc_grid.empty())
        throw std::invalid_argument("fit: degenerate search space");
    const std::uint32_t lc = scenario.lc_index();

    StagedFitResult result;
    for (const auto& counts : count_grid) {
        for (const double h_lc : h_lc_grid) {
            // common heating rate on the LC species and every embedded species
            std::vector<double> heating(scenario.species.size(), h_lc);
            FitCandidate cand;
            cand.counts = counts;
            cand.h_lc = h_lc;
            CandidateResult sim = simulate_candidate(scenario, counts, heating);
            cand.score = image_similarity(reference, sim.image);
            cand.temperatures = sim.temperatures;
            if (cand.score > result.best.score) result.best = cand;
            result.evaluated.push_back(std::move(cand));
        }
    }
    (void)lc;
    return result;
}

SympatheticFitResult fit_sympathetic_heating(const CcdImage& reference,
                                             const FitScenario& scenario,
                                             const std::vector<long>& counts, double h_lc_frozen,
                                             std::uint32_t sc_index,
                                             const std::vector<double>& h_sc_grid) {
    check_reference(reference, scenario);
    if (h_sc_grid.empty()) throw std::invalid_argument("fit: degenerate search space");
    if (sc_index >= scenario.species.size())
        throw std::invalid_argument("fit: bad sympathetic species index");

    SympatheticFitResult result;
    for (const double h_sc : h_sc_grid) {
        std::vector<double> heating(scenario.species.size(), h_lc_frozen);
        heating[sc_index] = h_sc;
        FitCandidate cand;
        cand.counts = counts;
        cand.h_lc = h_lc_frozen;
        CandidateResult sim = simulate_candidate(scenario, counts, heating);
        cand.score = image_similarity(reference, sim.image);
        cand.temperatures = sim.temperatures;
        if (cand.score > result.score) {
            result.score = cand.score;
            result.h_sc = h_sc;
            result.t_sc = cand.temperatures[sc_index];
            result.sympathetic_rate = h_sc;
        }
        result.evaluated.push_back(std::move(cand));
    }
    return result;
}

}  // namespace iontrap
