#include <doctest.h>

#include <cmath>
#include <vector>

#include "iontrap/constants.hpp"
#include "iontrap/rempd.hpp"
#include "iontrap/rng.hpp"

using namespace iontrap;
using namespace iontrap::constants;
using doctest::Approx;

namespace {

// dense matrix exponential by scaling and squaring with a Taylor series;
// independent oracle for the RK4 integrator
std::vector<double> expm(const std::vector<double>& m, std::size_t dim, double t) {
    std::vector<double> a(m.size());
    double norm = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < dim; ++j) row += std::abs(m[i * dim + j]) * t;
        norm = std::max(norm, row);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    for (std::size_t k = 0; k < m.size(); ++k) a[k] = m[k] * t * scale;

    std::vector<double> result(dim * dim, 0.0), term(dim * dim, 0.0), next(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        result[i * dim + i] = 1.0;
        term[i * dim + i] = 1.0;
    }
    for (int k = 1; k <= 24; ++k) {
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0;
                for (std::size_t l = 0; l < dim; ++l) s += term[i * dim + l] * a[l * dim + j];
                next[i * dim + j] = s / k;
            }
        term = next;
        for (std::size_t k2 = 0; k2 < result.size(); ++k2) result[k2] += term[k2];
    }
    for (int s = 0; s < squarings; ++s) {
        std::vector<double> sq(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double v = 0;
                for (std::size_t l = 0; l < dim; ++l)
                    v += result[i * dim + l] * result[l * dim + j];
                sq[i * dim + j] = v;
            }
        result = std::move(sq);
    }
    return result;
}

}  // namespace

TEST_CASE("level scheme loads and validates") {
    const LevelScheme s = LevelScheme::load_default();
    CHECK(s.levels.size() == 10);
    CHECK(s.find(0, 2) >= 0);
    CHECK(s.find(4, 1) >= 0);
    CHECK(s.find(1, 1) == -1);

    LevelScheme bad = s;
    bad.lines.push_back({s.find(4, 1), s.find(0, 3), 1.0});  // dJ = -2
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rate matrix structure") {
    const LevelScheme s = LevelScheme::load_default();
    RadiationEnv env;
    env.t_bbr = 300.0;
    const auto m = build_rate_matrix(s, env);
    const std::size_t dim = s.levels.size() + 1;

    // columns sum to zero: probability conserving
    for (std::size_t j = 0; j < dim; ++j) {
        double col = 0;
        for (std::size_t i = 0; i < dim; ++i) col += m[i * dim + j];
        CHECK(std::abs(col) < 1e-12);
    }

    // T = 0, no lasers: only spontaneous downward rates
    RadiationEnv cold;
    cold.t_bbr = 0.0;
    const auto mc = build_rate_matrix(s, cold);
    for (const auto& ln : s.lines) {
        const auto u = static_cast<std::size_t>(ln.upper), l = static_cast<std::size_t>(ln.lower);
        CHECK(mc[l * dim + u] == Approx(ln.a));
        CHECK(mc[u * dim + l] == 0.0);
    }

    // rotational BBR rates below 1/s, vibrational decay ~ 100/s
    double max_rot = 0;
    for (const auto& ln : s.lines) {
        if (s.levels[ln.upper].v != 0) continue;
        const auto u = static_cast<std::size_t>(ln.upper), l = static_cast<std::size_t>(ln.lower);
        max_rot = std::max({max_rot, m[l * dim + u], m[u * dim + l]});
    }
    CHECK(max_rot < 1.0);
    const auto up = static_cast<std::size_t>(s.find(4, 1));
    double vib = 0;
    for (const auto& ln : s.lines)
        if (static_cast<std::size_t>(ln.upper) == up) vib += ln.a;
    CHECK(vib == Approx(100.0));

    // detailed balance: the Boltzmann vector is stationary to rounding
    const PopulationVector boltz = boltzmann_populations(s, 300.0);
    std::vector<double> full(dim, 0.0);
    for (std::size_t i = 0; i < s.levels.size(); ++i) full[i] = boltz.p[i];
    // v=4 occupation at 300 K is ~ e^-33, irrelevant
    double max_flow = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        double flow = 0;
        for (std::size_t j = 0; j < dim; ++j) flow += m[i * dim + j] * full[j];
        max_flow = std::max(max_flow, std::abs(flow));
    }
    CHECK(max_flow < 1e-8);  // absolute, populations are O(0.1)

    // unknown level reference
    RadiationEnv bad_ir = env;
    bad_ir.ir = IrDrive{0, 2, 3, 1, 10.0};
    CHECK_THROWS_AS(build_rate_matrix(s, bad_ir), std::invalid_argument);
}

TEST_CASE("boltzmann initial state populates every J <= 6 above 5%") {
    const LevelScheme s = LevelScheme::load_default();
    const PopulationVector p = boltzmann_populations(s, 300.0);
    for (int j = 0; j <= 6; ++j) {
        const int idx = s.find(0, j);
        REQUIRE(idx >= 0);
        CHECK(p.p[static_cast<std::size_t>(idx)] > 0.05);
    }
}

TEST_CASE("integrator: zero matrix, normalization, expm oracle") {
    const LevelScheme s = LevelScheme::load_default();
    const std::size_t n = s.levels.size();
    const std::size_t dim = n + 1;

    // zero matrix: populations unchanged
    std::vector<double> zero(dim * dim, 0.0);
    PopulationVector init = boltzmann_populations(s, 300.0);
    const auto still = integrate(init, zero, n, 1.0, 10);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(still.points.back().p[i] == Approx(init.p[i]).epsilon(1e-12));

    // full environment vs matrix exponential, 1e-8 Linf
    RadiationEnv env;
    env.t_bbr = 300.0;
    env.ir = IrDrive{0, 2, 4, 1, 10.0};
    env.uv = UvField{1e5, 266e-9};
    const auto m = build_rate_matrix(s, env);
    const double t_end = 2.0;
    const auto traj = integrate(init, m, n, t_end, 4);
    const auto p_exact = expm(m, dim, t_end);
    std::vector<double> y0(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) y0[i] = init.p[i];
    double linf = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        double v = 0;
        for (std::size_t j = 0; j < dim; ++j) v += p_exact[i * dim + j] * y0[j];
        const double got =
            i < n ? traj.points.back().p[i] : traj.points.back().sink;
        linf = std::max(linf, std::abs(v - got));
    }
    CHECK(linf < 1e-8);

    // normalization preserved through the run
    for (const auto& pt : traj.points) CHECK(pt.total() == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("BBR-only relaxation reaches the Boltzmann state") {
    const LevelScheme s = LevelScheme::load_default();
    RadiationEnv env;
    env.t_bbr = 300.0;
    const auto m = build_rate_matrix(s, env);
    const std::size_t n = s.levels.size();

    PopulationVector delta;
    delta.p.assign(n, 0.0);
    delta.p[static_cast<std::size_t>(s.find(0, 2))] = 1.0;

    const PopulationVector target = boltzmann_populations(s, 300.0);
    auto l1_at = [&](double t) {
        const auto traj = integrate(delta, m, n, t, 2);
        double l1 = 0;
        for (std::size_t i = 0; i < n; ++i)
            l1 += std::abs(traj.points.back().p[i] - target.p[i]);
        return l1;
    };
    // slowest relaxation rate from the decay of the distance itself
    const double d1 = l1_at(100.0), d2 = l1_at(200.0);
    REQUIRE(d1 > d2);
    const double tau = 100.0 / std::log(d1 / d2);
    CHECK(l1_at(10.0 * tau) < 1e-4);
}

TEST_CASE("survival: UV off, monotonicity in intensity, two-level limit") {
    const LevelScheme s = LevelScheme::load_default();

    RadiationEnv no_uv;
    no_uv.t_bbr = 300.0;
    no_uv.ir = IrDrive{0, 2, 4, 1, 10.0};
    const SurvivalCurve c0 = rempd_survival(s, no_uv, 300.0, 5.0, 50);
    for (double v : c0.survival) CHECK(v == Approx(1.0).epsilon(1e-12));

    double prev_final = 1.0;
    for (const double i_uv : {1e4, 1e5, 1e6}) {
        RadiationEnv env;
        env.t_bbr = 300.0;
        env.ir = IrDrive{0, 2, 4, 1, 10.0};
        env.uv = UvField{i_uv, 266e-9};
        const SurvivalCurve c = rempd_survival(s, env, 300.0, 5.0, 50);
        CHECK(c.survival.back() < prev_final);
        prev_final = c.survival.back();
        // non-increasing along the curve
        for (std::size_t k = 1; k < c.survival.size(); ++k)
            CHECK(c.survival[k] <= c.survival[k - 1] + 1e-12);
    }

    // two-level analytic limit: all population in the pumped level, huge UV
    LevelScheme two;
    two.levels.push_back({0, 2, 0.0});
    two.levels.push_back({4, 1, 1.39e-19});
    two.dissociation.push_back({1, 1e-21});
    RadiationEnv env;
    env.t_bbr = 0.0;
    const double pump = 5.0;
    env.ir = IrDrive{0, 2, 4, 1, pump};
    env.uv = UvField{1e8, 266e-9};
    const auto m = build_rate_matrix(two, env);
    PopulationVector init;
    init.p = {1.0, 0.0};
    const auto traj = integrate(init, m, 2, 1.0, 20);
    const double survival = 1.0 - traj.points.back().sink;
    CHECK(std::log(survival) == Approx(-pump * 1.0).epsilon(0.02));
}

TEST_CASE("boltzmann_fit") {
    const LevelScheme s = LevelScheme::load_default();
    std::vector<Level> rot;
    for (const auto& l : s.levels)
        if (l.v == 0) rot.push_back(l);

    // exact 335 K synthetic data: recovery within 1%
    std::vector<double> pops;
    double z = 0;
    for (const auto& l : rot) {
        const double w = l.degeneracy() * std::exp(-l.energy / (k_boltzmann * 335.0));
        pops.push_back(w);
        z += w;
    }
    for (double& p : pops) p /= z;
    const BoltzmannFit fit = boltzmann_fit(rot, pops);
    CHECK(fit.thermal);
    CHECK(fit.t_rot == Approx(335.0).epsilon(0.01));

    // uniform populations over equally spaced levels: infinite temperature
    std::vector<Level> ladder;
    for (int k = 0; k < 5; ++k) ladder.push_back({0, 0, k * 1e-21});
    const std::vector<double> uniform(5, 0.2);
    const BoltzmannFit flat = boltzmann_fit(ladder, uniform);
    CHECK(std::isinf(flat.t_rot));
    CHECK(!flat.thermal);

    // 5% multiplicative noise, 20 trials: recovered within 11%
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> noisy = pops;
        for (std::size_t i = 0; i < noisy.size(); ++i)
            noisy[i] *= 1.0 + 0.05 * rng_gaussian(100 + trial, RngStream::noise, i, 0, 0);
        const BoltzmannFit nf = boltzmann_fit(rot, noisy);
        CHECK(std::abs(nf.t_rot - 335.0) / 335.0 < 0.11);
    }

    CHECK_THROWS_AS(boltzmann_fit(std::vector<Level>{{0, 0, 0.0}}, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("IR+UV survival shows two timescales") {
    const LevelScheme s = LevelScheme::load_default();
    RadiationEnv env;
    env.t_bbr = 300.0;
    env.ir = IrDrive{0, 2, 4, 1, 10.0};
    env.uv = UvField{1e5, 266e-9};  // 10 W/cm^2
    const SurvivalCurve c = rempd_survival(s, env, 300.0, 60.0, 600);
    const TwoTimescale ts = two_timescale_rates(c, 0.5);
    CHECK(ts.fast_rate > 0);
    CHECK(ts.slow_rate > 0);
    CHECK(ts.fast_rate / ts.slow_rate > 5.0);
}
