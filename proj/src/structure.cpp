#include "iontrap/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iontrap {

std::string to_string(PlasmaPhase p) {
    switch (p) {
        case PlasmaPhase::gas: return "gas";
        case PlasmaPhase::liquid: return "liquid";
        default: return "crystallized";
    }
}

namespace {

void histogram_pairs(const std::vector<Vec3>& a, const std::vector<Vec3>& b, bool same,
                     double r_max, std::vector<double>& h) {
    const double inv_dr = static_cast<double>(h.size()) / r_max;
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = same ? i + 1 : 0; j < b.size(); ++j) {
            if (!same && j == i) continue;  // cross-frame: skip the ion against itself
            const double r = norm(a[i] - b[j]);
            if (r < r_max) h[static_cast<size_t>(r * inv_dr)] += 1.0;
        }
    }
}

// local maxima above a prominence floor; data assumed smoothed
int count_peaks(const std::vector<double>& v, double floor_value) {
    int peaks = 0;
    for (size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > floor_value) ++peaks;
    return peaks;
}

std::vector<double> smooth(const std::vector<double>& v, int half) {
    std::vector<double> out(v.size(), 0.0);
    for (size_t i = 0; i < v.size(); ++i) {
        double s = 0;
        int n = 0;
        for (int d = -half; d <= half; ++d) {
            const long j = static_cast<long>(i) + d;
            if (j >= 0 && j < static_cast<long>(v.size())) {
                s += v[static_cast<size_t>(j)];
                ++n;
            }
        }
        out[i] = s / n;
    }
    return out;
}

}  // namespace

StructureMetrics structure_metrics(const TrajectoryProbe& window, double spacing) {
    const auto& frames = window.frames();
    if (frames.empty() || frames.front().pos.empty())
        throw std::invalid_argument("structure_metrics: empty window");
    const size_t n_ions = frames.front().pos.size();
    if (frames.size() < 100)
        throw std::invalid_argument("structure_metrics: need at least 100 samples per ion");

    StructureMetrics m;
    const double r_max = 4.0 * spacing;
    const size_t bins = 80;

    // equal-time pair histogram and a cross-frame reference with the same
    // one-particle envelope but no correlations
    std::vector<double> h_eq(bins, 0.0), h_ref(bins, 0.0);
    const size_t half = frames.size() / 2;
    for (size_t f = 0; f < frames.size(); ++f) {
        histogram_pairs(frames[f].pos, frames[f].pos, true, r_max, h_eq);
        histogram_pairs(frames[f].pos, frames[(f + half) % frames.size()].pos, false, r_max,
                        h_ref);
    }

    m.g_r.resize(bins);
    m.g_bins.resize(bins);
    for (size_t b = 0; b < bins; ++b) {
        m.g_bins[b] = (b + 0.5) * r_max / bins;
        // cross-frame histogram counts every ordered-ish pair once per frame;
        // equal-time counts unordered pairs
        m.g_r[b] = h_ref[b] > 0 ? 2.0 * h_eq[b] / h_ref[b] : 0.0;
    }

    // non-monotonicity: an interior local maximum above the later minimum
    const auto gs = smooth(m.g_r, 2);
    const size_t b_lo = static_cast<size_t>(0.3 * spacing / (r_max / bins));
    const size_t b_hi = std::min(bins - 2, static_cast<size_t>(3.5 * spacing / (r_max / bins)));
    double best_peak = 0, best_drop = 0;
    for (size_t b = std::max<size_t>(1, b_lo); b < b_hi; ++b) {
        if (gs[b] > gs[b - 1] && gs[b] >= gs[b + 1]) {
            double vmin = gs[b];
            for (size_t c = b + 1; c <= b_hi; ++c) vmin = std::min(vmin, gs[c]);
            if (gs[b] > best_peak) {
                best_peak = gs[b];
                best_drop = gs[b] - vmin;
            }
        }
    }
    m.g_nonmonotonic = best_peak >= 1.03 && best_drop >= 0.04;

    // radial shell profile over the central axial band
    double z_max = 0;
    for (const auto& p : frames.front().pos) z_max = std::max(z_max, std::abs(p.z));
    const double band = 0.5 * z_max;
    double rho_max = 0;
    for (const auto& p : frames.front().pos)
        rho_max = std::max(rho_max, std::hypot(p.x, p.y));
    rho_max *= 1.3;
    if (rho_max <= 0) rho_max = spacing;
    const size_t rho_bins = 60;
    std::vector<double> h_rho(rho_bins, 0.0);
    size_t band_samples = 0;
    for (const auto& f : frames)
        for (const auto& p : f.pos) {
            if (std::abs(p.z) > band) continue;
            const double rho = std::hypot(p.x, p.y);
            if (rho < rho_max) {
                h_rho[static_cast<size_t>(rho / rho_max * rho_bins)] += 1.0;
                ++band_samples;
            }
        }
    m.shell_rho.resize(rho_bins);
    m.shell_density.resize(rho_bins);
    const double drho = rho_max / rho_bins;
    for (size_t b = 0; b < rho_bins; ++b) {
        m.shell_rho[b] = (b + 0.5) * drho;
        const double vol = 2.0 * 3.14159265358979323846 * m.shell_rho[b] * drho * 2.0 * band;
        m.shell_density[b] = band_samples > 0 ? h_rho[b] / (vol * frames.size()) : 0.0;
    }
    const auto ds = smooth(m.shell_density, 1);
    const double peak_floor = 0.25 * *std::max_element(ds.begin(), ds.end());
    m.shell_count = count_peaks(ds, peak_floor);

    // caging: rms displacement about the time-mean site, com drift removed
    std::vector<Vec3> mean(n_ions);
    std::vector<Vec3> com(frames.size());
    for (size_t f = 0; f < frames.size(); ++f) {
        Vec3 c{};
        for (const auto& p : frames[f].pos) c += p;
        com[f] = (1.0 / static_cast<double>(n_ions)) * c;
    }
    for (size_t f = 0; f < frames.size(); ++f)
        for (size_t i = 0; i < n_ions; ++i) mean[i] += frames[f].pos[i] - com[f];
    for (auto& v : mean) v *= 1.0 / static_cast<double>(frames.size());
    double disp2 = 0;
    for (size_t f = 0; f < frames.size(); ++f)
        for (size_t i = 0; i < n_ions; ++i)
            disp2 += norm2(frames[f].pos[i] - com[f] - mean[i]);
    disp2 /= static_cast<double>(frames.size() * n_ions);
    m.caging_ratio = std::sqrt(disp2) / spacing;

    if (m.caging_ratio < 0.3)
        m.phase = PlasmaPhase::crystallized;
    else if (m.g_nonmonotonic)
        m.phase = PlasmaPhase::liquid;
    else
        m.phase = PlasmaPhase::gas;
    return m;
}

}  // namespace iontrap
