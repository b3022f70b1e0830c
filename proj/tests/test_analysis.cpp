#include <doctest.h>

#include <cmath>

#include "iontrap/constants.hpp"
#include "iontrap/imaging.hpp"
#include "iontrap/lineshape.hpp"
#include "iontrap/rng.hpp"
#include "iontrap/spectra.hpp"
#include "iontrap/structure.hpp"

using namespace iontrap;
using namespace iontrap::constants;
using doctest::Approx;

namespace {

TrajectoryProbe make_probe(const std::vector<std::vector<Vec3>>& frames, double dt) {
    TrajectoryProbe probe(1, std::nullopt);
    for (std::size_t f = 0; f < frames.size(); ++f)
        probe.append_frame(static_cast<double>(f) * dt, frames[f]);
    return probe;
}

}  // namespace

TEST_CASE("render_ccd basics") {
    const auto frames = std::vector<std::vector<Vec3>>(10, {Vec3{0, 0, 0}});
    TrajectoryProbe probe = make_probe(frames, 1e-5);

    ImageConfig cfg;
    cfg.view = ViewPlane::zy;
    cfg.pixel_size = 2e-6;
    cfg.width = 21;
    cfg.height = 21;
    cfg.exposure = 1e-4;
    cfg.psf_sigma = 0;
    cfg.brightness = 3.0;

    const CcdImage img = render_ccd(probe, cfg, "x");
    CHECK(img.total() == Approx(10 * 3.0));
    // all intensity in a single pixel
    int nonzero = 0;
    for (double v : img.data)
        if (v > 0) ++nonzero;
    CHECK(nonzero == 1);

    // identical renders are bit-identical
    const CcdImage img2 = render_ccd(probe, cfg, "x");
    CHECK(img.data == img2.data);

    // the psf conserves total intensity to 0.1%
    ImageConfig blurred = cfg;
    blurred.psf_sigma = 4e-6;
    const CcdImage img3 = render_ccd(probe, blurred, "x");
    CHECK(img3.total() == Approx(img.total()).epsilon(1e-3));

    CHECK_THROWS_AS(render_ccd(TrajectoryProbe(1, std::nullopt), cfg, "x"),
                    std::invalid_argument);
}

TEST_CASE("image similarity properties") {
    // two random-ish images
    CcdImage a, b;
    a.width = b.width = 16;
    a.height = b.height = 16;
    a.data.resize(256);
    b.data.resize(256);
    for (int i = 0; i < 256; ++i) {
        a.data[i] = rng_uniform(4, RngStream::noise, i, 0);
        b.data[i] = rng_uniform(4, RngStream::noise, i, 1);
    }
    CHECK(image_similarity(a, a) == Approx(1.0).epsilon(1e-12));

    CcdImage neg = a;
    for (double& v : neg.data) v = -v;
    CHECK(image_similarity(a, neg) == Approx(-1.0).epsilon(1e-12));

    // symmetry and affine invariance
    CHECK(image_similarity(a, b) == Approx(image_similarity(b, a)).epsilon(1e-12));
    CcdImage scaled = a;
    for (double& v : scaled.data) v = 3.5 * v + 10.0;
    CHECK(image_similarity(scaled, b) == Approx(image_similarity(a, b)).epsilon(1e-10));

    CcdImage wrong;
    wrong.width = 8;
    wrong.height = 8;
    wrong.data.resize(64);
    CHECK_THROWS_AS(image_similarity(a, wrong), std::invalid_argument);
}

TEST_CASE("structure metrics label uncorrelated positions as gas") {
    // ideal-gas positions in a spheroid, static over the window
    std::vector<std::vector<Vec3>> frames;
    const double spacing = 30e-6;
    std::vector<Vec3> base;
    for (int i = 0; i < 300; ++i) {
        Vec3 u;
        int k = 0;
        do {
            u = {2 * rng_uniform(8, RngStream::noise, i, k, 0) - 1,
                 2 * rng_uniform(8, RngStream::noise, i, k, 1) - 1,
                 2 * rng_uniform(8, RngStream::noise, i, k, 2) - 1};
            ++k;
        } while (norm2(u) > 1);
        base.push_back({u.x * 6 * spacing, u.y * 6 * spacing, u.z * 12 * spacing});
    }
    for (int f = 0; f < 120; ++f) {
        std::vector<Vec3> frame = base;
        for (int i = 0; i < 300; ++i) {
            // re-draw completely each frame: uncorrelated ideal gas, moving
            Vec3 u;
            int k = 100 + f;
            do {
                u = {2 * rng_uniform(8, RngStream::noise, i, k, 0) - 1,
                     2 * rng_uniform(8, RngStream::noise, i, k, 1) - 1,
                     2 * rng_uniform(8, RngStream::noise, i, k, 2) - 1};
                k += 1000;
            } while (norm2(u) > 1);
            frame[i] = {u.x * 6 * spacing, u.y * 6 * spacing, u.z * 12 * spacing};
        }
        frames.push_back(std::move(frame));
    }
    TrajectoryProbe probe = make_probe(frames, 1e-5);
    const StructureMetrics m = structure_metrics(probe, spacing);
    CHECK(!m.g_nonmonotonic);
    CHECK(m.phase == PlasmaPhase::gas);
    CHECK(m.caging_ratio > 0.3);
}

TEST_CASE("peak finding with quadratic interpolation") {
    std::vector<double> freq, resp;
    for (int i = 0; i < 200; ++i) {
        const double f = 1000.0 + i * 10.0;
        freq.push_back(f);
        double v = 0.01;
        // Lorentzian at 1997 Hz (off-bin), another at 2500
        v += 1.0 / (1 + std::pow((f - 1997.0) / 30.0, 2));
        v += 0.5 / (1 + std::pow((f - 2500.0) / 30.0, 2));
        resp.push_back(v);
    }
    const auto peaks = find_peaks(freq, resp, 5.0);
    REQUIRE(peaks.size() >= 2);
    CHECK(peaks[0].frequency == Approx(1997.0).epsilon(2e-3));
    CHECK(peaks[1].frequency == Approx(2500.0).epsilon(2e-3));
    CHECK(peaks[0].height > peaks[1].height);
}

TEST_CASE("voigt limits") {
    // sigma -> 0: Lorentzian; gamma small: Gaussian peak value
    CHECK(voigt(0.0, 0.0, 2.0) == Approx(1.0 / (pi * 2.0)).epsilon(1e-12));
    const double sg = 3.0;
    CHECK(voigt(0.0, sg, 1e-8) == Approx(1.0 / (sg * std::sqrt(2 * pi))).epsilon(1e-3));
    // normalization: trapezoid over a wide grid
    double sum = 0;
    const double dx = 0.05;
    for (double x = -400; x <= 400; x += dx) sum += voigt(x, 2.0, 1.0) * dx;
    CHECK(sum == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("lineshape thermometry") {
    const double mass = 9.0121831 * atomic_mass_unit;
    LineshapeConfig cfg;
    cfg.wavelength = 313.13e-9;
    cfg.natural_fwhm_hz = 19.4e6;
    for (double f = -80e6; f <= 80e6; f += 0.5e6) cfg.scan_hz.push_back(f);

    // zero velocities: fitted temperature ~ 0 (well below 1 mK)
    std::vector<double> zeros(500, 0.0);
    const LineshapeFit f0 = lineshape_fit(zeros, mass, cfg);
    CHECK(f0.temperature < 1e-3);

    auto synth = [&](double t_k, int n, std::uint64_t seed) {
        std::vector<double> v(n);
        const double sigma = std::sqrt(k_boltzmann * t_k / mass);
        for (int i = 0; i < n; ++i) v[i] = sigma * rng_gaussian(seed, RngStream::noise, i, 0, 0);
        return v;
    };

    // 5 mK sample recovered within +-5 mK
    const LineshapeFit f5 = lineshape_fit(synth(5e-3, 4000, 21), mass, cfg);
    CHECK(f5.converged);
    CHECK(std::abs(f5.temperature - 5e-3) < 5e-3);

    // fitted width^2 linear in T: slope of T_fit vs T_true within 5% of 1
    const double temps[3] = {10e-3, 40e-3, 90e-3};
    double sxy = 0, sxx = 0;
    for (int k = 0; k < 3; ++k) {
        const LineshapeFit fk = lineshape_fit(synth(temps[k], 4000, 50 + k), mass, cfg);
        sxy += temps[k] * fk.temperature;
        sxx += temps[k] * temps[k];
    }
    CHECK(sxy / sxx == Approx(1.0).epsilon(0.05));
}
