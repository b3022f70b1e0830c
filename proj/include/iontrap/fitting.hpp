#pragma once

#include <vector>

#include "iontrap/imaging.hpp"
#include "iontrap/simulator.hpp"

namespace iontrap {

// Candidate pipeline for image fits: init -> friction relax -> thermostat
// equilibration -> render the laser-cooled species over a sampling window.
struct FitScenario {
    TrapConfig trap;
    std::vector<IonSpecies> species;  // exactly one laser-cooled entry
    std::uint64_t seed = 1;
    double timestep = 0;  // 0 = mode ceiling
    double relax_time = 2e-3;
    double relax_beta_per_mass = 2e4;  // 1/s
    double equil_time = 4e-3;
    double render_window = 1e-3;
    std::size_t sample_stride = 20;
    ImageConfig image;

    std::uint32_t lc_index() const;  // throws unless exactly one LC species
};

struct CandidateResult {
    CcdImage image;
    std::vector<double> temperatures;  // measured K per species over the window
};

// heating: K/s per species index
CandidateResult simulate_candidate(const FitScenario& scenario, const std::vector<long>& counts,
                                   const std::vector<double>& heating);

struct FitCandidate {
    std::vector<long> counts;
    double h_lc = 0;  // K/s
    double score = -2;
    std::vector<double> temperatures;
};

struct StagedFitResult {
    FitCandidate best;
    std::vector<FitCandidate> evaluated;
};

// Stage one of the staged workflow: on the reduced (LC (+ embedded SC))
// system, grid over ion counts and the common heating rate; every candidate
// is simulated, rendered, and scored by normalized cross-correlation against
// the reference. Deterministic: ties keep the earliest candidate.
StagedFitResult fit_counts_and_heating(const CcdImage& reference, const FitScenario& scenario,
                                       const std::vector<std::vector<long>>& count_grid,
                                       const std::vector<double>& h_lc_grid);

struct SympatheticFitResult {
    double h_sc = 0;             // K/s, best
    double t_sc = 0;             // K, measured at the best candidate
    double sympathetic_rate = 0; // K/s, equals h_sc in equilibrium
    double score = -2;
    std::vector<FitCandidate> evaluated;
};

// Stage two: full system with the heavy species included, h_lc frozen, grid
// over the heavy species' heating rate only.
SympatheticFitResult fit_sympathetic_heating(const CcdImage& reference,
                                             const FitScenario& scenario,
                                             const std::vector<long>& counts, double h_lc_frozen,
                                             std::uint32_t sc_index,
                                             const std::vector<double>& h_sc_grid);

}  // namespace iontrap
