#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iontrap {

struct Level {
    int v = 0, j = 0;
    double energy = 0;  // J
    double degeneracy() const { return 2 * j + 1; }
};

struct Line {
    int upper = 0, lower = 0;  // level indices
    double a = 0;              // Einstein A, 1/s
};

// Rovibrational levels, spontaneous lines (dJ = +-1 enforced), and per-level
// UV dissociation cross sections. File format, one record per line:
//   level v J energy_J
//   line  v J v' J' A_per_s      (upper -> lower)
//   diss  v J sigma_m2
struct LevelScheme {
    std::vector<Level> levels;
    std::vector<Line> lines;
    std::vector<std::pair<int, double>> dissociation;  // (level index, sigma)

    int find(int v, int j) const;  // -1 when absent
    void validate() const;
    static LevelScheme load(const std::string& path);
    static LevelScheme load_default();  // data/hdplus_toy.lvl
};

struct IrDrive {
    int from_v = 0, from_j = 0, to_v = 0, to_j = 0;
    double rate = 0;           // 1/s pump rate (absorption); 0 = use intensity
    double intensity = 0;      // W/m^2
    double cross_section = 0;  // m^2
    double wavelength = 0;     // m
};

struct UvField {
    double intensity = 0;   // W/m^2
    double wavelength = 266e-9;
};

struct RadiationEnv {
    double t_bbr = 0;  // K
    std::optional<IrDrive> ir;
    std::optional<UvField> uv;
};

// Generator matrix of the rate equations, (n+1) x (n+1) with the dissociated
// sink as the last row/column, column-major convention M(i,j) = rate j -> i,
// diagonal = -column sum. BBR-stimulated rates use the Planck occupation,
// upward rates carry the degeneracy ratio, so detailed balance holds exactly.
std::vector<double> build_rate_matrix(const LevelScheme& scheme, const RadiationEnv& env);

struct PopulationVector {
    std::vector<double> p;  // per level
    double sink = 0;
    double total() const;
};

struct PopulationTrajectory {
    std::vector<double> t;
    std::vector<PopulationVector> points;
};

// Fixed-step RK4 with step <= 0.1 / max |diagonal|; keeps normalization to
// 1e-9 and reports stiffness via exception when the required step count
// exceeds 10^8.
PopulationTrajectory integrate(const PopulationVector& initial,
                               std::span<const double> matrix, std::size_t n_levels,
                               double duration, std::size_t samples = 200);

// normalized Boltzmann populations over the v = 0 rotational levels
PopulationVector boltzmann_populations(const LevelScheme& scheme, double t_rot);

// survival N(t)/N0 = 1 - sink(t) starting from Boltzmann(t_rot)
struct SurvivalCurve {
    std::vector<double> t;
    std::vector<double> survival;
};
SurvivalCurve rempd_survival(const LevelScheme& scheme, const RadiationEnv& env, double t_rot,
                             double duration, std::size_t samples = 400);

struct BoltzmannFit {
    double t_rot = 0;      // K
    double residual = 0;   // rms in ln space
    bool thermal = false;  // residual below threshold and finite slope
};

// weighted least squares of ln(p_J / (2J+1)) against E_J
BoltzmannFit boltzmann_fit(std::span<const Level> levels, std::span<const double> populations);

// two-window exponential rates of a survival curve (fast/slow timescales)
struct TwoTimescale {
    double fast_rate = 0, slow_rate = 0;  // 1/s
};
TwoTimescale two_timescale_rates(const SurvivalCurve& curve, double t_split);

}  // namespace iontrap
