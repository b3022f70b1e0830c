#pragma once

#include <vector>

#include "iontrap/observers.hpp"

namespace iontrap {

enum class PlasmaPhase { gas, liquid, crystallized };

std::string to_string(PlasmaPhase p);

struct StructureMetrics {
    std::vector<double> g_r;       // pair correlation values
    std::vector<double> g_bins;    // bin centers, m
    std::vector<double> shell_rho;      // cylindrical radius bin centers, m
    std::vector<double> shell_density;  // 1/m^3
    int shell_count = 0;
    double caging_ratio = 0;  // rms displacement / mean spacing
    bool g_nonmonotonic = false;
    PlasmaPhase phase = PlasmaPhase::gas;
};

// Pair correlation from equal-time pairs against a cross-frame reference
// (same envelope, no correlations), radial shell profile over the central
// axial band, Lindemann-style caging ratio. Phase label: crystallized when
// caging < 0.3, otherwise liquid when g(r) oscillates, otherwise gas.
// `spacing` is the expected interparticle spacing (plasma_estimate).
// The window must provide at least 100 samples per ion.
StructureMetrics structure_metrics(const TrajectoryProbe& window, double spacing);

}  // namespace iontrap
