#include "iontrap/rempd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "iontrap/constants.hpp"

#ifndef IONTRAP_DATA_DIR
#define IONTRAP_DATA_DIR "data"
#endif

namespace iontrap {

using namespace constants;

int LevelScheme::find(int v, int j) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i].v == v && levels[i].j == j) return static_cast<int>(i);
    return -1;
}

void LevelScheme::validate() const {
    if (levels.empty()) throw std::invalid_argument("level scheme: no levels");
    for (const auto& ln : lines) {
        if (ln.upper < 0 || ln.upper >= static_cast<int>(levels.size()) || ln.lower < 0 ||
            ln.lower >= static_cast<int>(levels.size()))
            throw std::invalid_argument("level scheme: line references unknown level");
        if (ln.a < 0) throw std::invalid_argument("level scheme: negative A coefficient");
        if (levels[ln.upper].energy <= levels[ln.lower].energy)
            throw std::invalid_argument("level scheme: line upper level not above lower");
        const int dj = levels[ln.upper].j - levels[ln.lower].j;
        if (dj != 1 && dj != -1)
            throw std::invalid_argument("level scheme: line violates dJ = +-1");
    }
    for (const auto& [idx, sigma] : dissociation) {
        if (idx < 0 || idx >= static_cast<int>(levels.size()))
            throw std::invalid_argument("level scheme: dissociation references unknown level");
        if (sigma < 0) throw std::invalid_argument("level scheme: negative cross section");
    }
}

LevelScheme LevelScheme::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open level scheme: " + path);
    LevelScheme s;
    std::string raw;
    int lineno = 0;
    struct PendingLine {
        int uv, uj, lv, lj;
        double a;
        int lineno;
    };
    struct PendingDiss {
        int v, j;
        double sigma;
        int lineno;
    };
    std::vector<PendingLine> pend_lines;
    std::vector<PendingDiss> pend_diss;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        std::string kind;
        if (!(ss >> kind)) continue;
        if (kind == "level") {
            Level l;
            if (!(ss >> l.v >> l.j >> l.energy))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad level record");
            s.levels.push_back(l);
        } else if (kind == "line") {
            PendingLine p;
            p.lineno = lineno;
            if (!(ss >> p.uv >> p.uj >> p.lv >> p.lj >> p.a))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad line record");
            pend_lines.push_back(p);
        } else if (kind == "diss") {
            PendingDiss p;
            p.lineno = lineno;
            if (!(ss >> p.v >> p.j >> p.sigma))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad diss record");
            pend_diss.push_back(p);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown record '" + kind + "'");
        }
    }
    for (const auto& p : pend_lines) {
        const int u = s.find(p.uv, p.uj), l = s.find(p.lv, p.lj);
        if (u < 0 || l < 0)
            throw std::runtime_error(path + ":" + std::to_string(p.lineno) +
                                     ": line references unknown level");
        s.lines.push_back({u, l, p.a});
    }
    for (const auto& p : pend_diss) {
        const int idx = s.find(p.v, p.j);
        if (idx < 0)
            throw std::runtime_error(path + ":" + std::to_string(p.lineno) +
                                     ": diss references unknown level");
        s.dissociation.push_back({idx, p.sigma});
    }
    s.validate();
    return s;
}

LevelScheme LevelScheme::load_default() {
    return load(std::string(IONTRAP_DATA_DIR) + "/hdplus_toy.lvl");
}

namespace {

// Planck occupation at the transition frequency
double planck_occupation(double energy_gap, double t_bbr) {
    if (t_bbr <= 0) return 0.0;
    const double x = energy_gap / (k_boltzmann * t_bbr);
    if (x > 700) return 0.0;
    return 1.0 / (std::expm1(x));
}

}  // namespace

std::vector<double> build_rate_matrix(const LevelScheme& scheme, const RadiationEnv& env) {
    scheme.validate();
    const std::size_t n = scheme.levels.size();
    const std::size_t dim = n + 1;  // sink last
    std::vector<double> m(dim * dim, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * dim + j]; };

    for (const auto& ln : scheme.lines) {
        const auto u = static_cast<std::size_t>(ln.upper);
        const auto l = static_cast<std::size_t>(ln.lower);
        const double gap = scheme.levels[u].energy - scheme.levels[l].energy;
        const double nbar = planck_occupation(gap, env.t_bbr);
        const double g_ratio = scheme.levels[u].degeneracy() / scheme.levels[l].degeneracy();
        at(l, u) += ln.a * (1.0 + nbar);     // spontaneous + stimulated downward
        at(u, l) += ln.a * nbar * g_ratio;   // BBR absorption
    }

    if (env.ir) {
        const int lo = scheme.find(env.ir->from_v, env.ir->from_j);
        const int hi = scheme.find(env.ir->to_v, env.ir->to_j);
        if (lo < 0 || hi < 0)
            throw std::invalid_argument("rate matrix: IR transition references unknown level");
        double rate = env.ir->rate;
        if (rate <= 0 && env.ir->intensity > 0 && env.ir->cross_section > 0 &&
            env.ir->wavelength > 0) {
            const double photon = planck_h * speed_of_light / env.ir->wavelength;
            rate = env.ir->cross_section * env.ir->intensity / photon;
        }
        const auto l = static_cast<std::size_t>(lo), u = static_cast<std::size_t>(hi);
        const double g_ratio = scheme.levels[l].degeneracy() / scheme.levels[u].degeneracy();
        at(u, l) += rate;            // pump
        at(l, u) += rate * g_ratio;  // stimulated return
    }

    if (env.uv && env.uv->intensity > 0) {
        const double photon = planck_h * speed_of_light / env.uv->wavelength;
        const double flux = env.uv->intensity / photon;
        for (const auto& [idx, sigma] : scheme.dissociation)
            at(n, static_cast<std::size_t>(idx)) += sigma * flux;
    }

    // probability conservation: diagonal = -column sum
    for (std::size_t j = 0; j < dim; ++j) {
        double col = 0;
        for (std::size_t i = 0; i < dim; ++i)
            if (i != j) col += at(i, j);
        at(j, j) = -col;
    }
    return m;
}

double PopulationVector::total() const {
    double s = sink;
    for (double v : p) s += v;
    return s;
}

PopulationTrajectory integrate(const PopulationVector& initial, std::span<const double> matrix,
                               std::size_t n_levels, double duration, std::size_t samples) {
    const std::size_t dim = n_levels + 1;
    if (matrix.size() != dim * dim) throw std::invalid_argument("integrate: matrix size mismatch");
    if (!(duration > 0)) throw std::invalid_argument("integrate: duration must be > 0");
    if (initial.p.size() != n_levels) throw std::invalid_argument("integrate: population size");

    double max_diag = 0;
    for (std::size_t j = 0; j < dim; ++j)
        max_diag = std::max(max_diag, std::abs(matrix[j * dim + j]));
    double h = max_diag > 0 ? 0.1 / max_diag : duration;
    const double steps_needed = duration / h;
    if (steps_needed > 1e8)
        throw std::runtime_error("integrate: stiffness guard tripped (step too small)");

    const auto n_steps = static_cast<std::size_t>(std::ceil(steps_needed));
    h = duration / static_cast<double>(n_steps);

    std::vector<double> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (std::size_t i = 0; i < n_levels; ++i) y[i] = initial.p[i];
    y[n_levels] = initial.sink;

    auto deriv = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < dim; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < dim; ++j) s += matrix[i * dim + j] * in[j];
            out[i] = s;
        }
    };

    PopulationTrajectory traj;
    const std::size_t stride = std::max<std::size_t>(1, n_steps / std::max<std::size_t>(samples, 1));
    auto record = [&](double t) {
        PopulationVector pv;
        pv.p.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_levels));
        pv.sink = y[n_levels];
        traj.t.push_back(t);
        traj.points.push_back(std::move(pv));
    };
    record(0.0);
    for (std::size_t s = 0; s < n_steps; ++s) {
        deriv(y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        deriv(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
        deriv(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if ((s + 1) % stride == 0 || s + 1 == n_steps)
            record(static_cast<double>(s + 1) * h);
    }
    return traj;
}

PopulationVector boltzmann_populations(const LevelScheme& scheme, double t_rot) {
    PopulationVector pv;
    pv.p.assign(scheme.levels.size(), 0.0);
    double z = 0;
    double e0 = std::numeric_limits<double>::max();
    for (const auto& l : scheme.levels)
        if (l.v == 0) e0 = std::min(e0, l.energy);
    for (std::size_t i = 0; i < scheme.levels.size(); ++i) {
        const Level& l = scheme.levels[i];
        if (l.v != 0) continue;
        const double w = l.degeneracy() * std::exp(-(l.energy - e0) / (k_boltzmann * t_rot));
        pv.p[i] = w;
        z += w;
    }
    for (double& v : pv.p) v /= z;
    return pv;
}

SurvivalCurve rempd_survival(const LevelScheme& scheme, const RadiationEnv& env, double t_rot,
                             double duration, std::size_t samples) {
    const auto matrix = build_rate_matrix(scheme, env);
    const PopulationVector init = boltzmann_populations(scheme, t_rot);
    const PopulationTrajectory traj =
        integrate(init, matrix, scheme.levels.size(), duration, samples);
    SurvivalCurve out;
    out.t = traj.t;
    out.survival.reserve(traj.points.size());
    for (const auto& pv : traj.points) out.survival.push_back(1.0 - pv.sink);
    return out;
}

BoltzmannFit boltzmann_fit(std::span<const Level> levels, std::span<const double> populations) {
    if (levels.size() != populations.size())
        throw std::invalid_argument("boltzmann_fit: size mismatch");
    // weighted least squares of y = ln(p/g) vs E, weights = populations
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(populations[i] > 0)) continue;
        const double w = populations[i];
        const double x = levels[i].energy;
        const double y = std::log(populations[i] / levels[i].degeneracy());
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
        ++used;
    }
    if (used < 3) throw std::invalid_argument("boltzmann_fit: need >= 3 levels with weight");
    const double denom = sw * swxx - swx * swx;
    const double slope = (sw * swxy - swx * swy) / denom;
    const double intercept = (swy - slope * swx) / sw;

    BoltzmannFit fit;
    fit.t_rot = slope < 0 ? -1.0 / (k_boltzmann * slope) : std::numeric_limits<double>::infinity();
    double r2 = 0;
    double wsum = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(populations[i] > 0)) continue;
        const double y = std::log(populations[i] / levels[i].degeneracy());
        const double d = y - (intercept + slope * levels[i].energy);
        r2 += populations[i] * d * d;
        wsum += populations[i];
    }
    fit.residual = std::sqrt(r2 / wsum);
    fit.thermal = std::isfinite(fit.t_rot) && fit.residual < 0.2;
    return fit;
}

TwoTimescale two_timescale_rates(const SurvivalCurve& curve, double t_split) {
    auto rate_in = [&](double t0, double t1) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            if (curve.t[i] < t0 || curve.t[i] > t1 || !(curve.survival[i] > 0)) continue;
            const double y = std::log(curve.survival[i]);
            sx += curve.t[i];
            sy += y;
            sxx += curve.t[i] * curve.t[i];
            sxy += curve.t[i] * y;
            ++n;
        }
        if (n < 2) return 0.0;
        const double denom = static_cast<double>(n) * sxx - sx * sx;
        return denom != 0 ? -(static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
    };
    TwoTimescale ts;
    ts.fast_rate = rate_in(0.0, t_split);
    ts.slow_rate = rate_in(2.0 * t_split, curve.t.empty() ? 0.0 : curve.t.back());
    return ts;
}

}  // namespace iontrap
