#include "iontrap/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

std::vector<SpectrumPeak> find_peaks(const std::vector<double>& freq,
                                     const std::vector<double>& response, double floor_factor) {
    if (freq.size() != response.size() || freq.size() < 3) return {};
    std::vector<double> sorted = response;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double floor_value = floor_factor * std::max(median, 0.0);

    std::vector<SpectrumPeak> peaks;
    for (size_t i = 1; i + 1 < response.size(); ++i) {
        if (!(response[i] > response[i - 1] && response[i] >= response[i + 1])) continue;
        if (!(response[i] > floor_value)) continue;
        // quadratic interpolation around the maximum
        const double y0 = response[i - 1], y1 = response[i], y2 = response[i + 1];
        const double denom = y0 - 2 * y1 + y2;
        const double delta = denom != 0 ? 0.5 * (y0 - y2) / denom : 0.0;
        const double df = freq[i + 1] - freq[i];
        SpectrumPeak p;
        p.frequency = freq[i] + delta * df;
        p.height = y1 - 0.25 * (y0 - y2) * delta;
        // width: distance between half-height crossings
        const double half = 0.5 * p.height;
        size_t lo = i, hi = i;
        while (lo > 0 && response[lo] > half) --lo;
        while (hi + 1 < response.size() && response[hi] > half) ++hi;
        p.width = freq[hi] - freq[lo];
        peaks.push_back(p);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectrumPeak& a, const SpectrumPeak& b) { return a.height > b.height; });
    return peaks;
}

Spectrum power_spectrum(const std::vector<double>& samples, double sample_dt) {
    size_t n = 1;
    while (2 * n <= samples.size()) n *= 2;
    if (n < 8) throw std::invalid_argument("power_spectrum: too few samples");

    std::vector<double> windowed(n);
    for (size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2 * pi * static_cast<double>(i) /
                                               static_cast<double>(n - 1)));
        windowed[i] = samples[i] * w;
    }
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan =
        fftw_plan_dft_r2c_1d(static_cast<int>(n), windowed.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    Spectrum sp;
    sp.method = "fft-power";
    sp.freq.resize(n / 2 + 1);
    sp.response.resize(n / 2 + 1);
    for (size_t k = 0; k <= n / 2; ++k) {
        sp.freq[k] = static_cast<double>(k) / (static_cast<double>(n) * sample_dt);
        sp.response[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }
    sp.peaks = find_peaks(sp.freq, sp.response);
    return sp;
}

Spectrum spectrum_fft(Simulator& sim, std::uint32_t target_species, double offset_fraction,
                      double duration, std::size_t stride, double min_expected_frequency) {
    if (min_expected_frequency > 0 && duration < 10.0 / min_expected_frequency)
        throw std::invalid_argument("spectrum_fft: evolution shorter than 10 periods of the "
                                    "lowest expected frequency");
    EnsembleState& state = sim.state();

    // rms radius of the target species sets the displacement scale
    double r2 = 0;
    size_t count = 0;
    for (size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i] || state.species[i] != target_species) continue;
        r2 += state.x[i] * state.x[i] + state.y[i] * state.y[i];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("spectrum_fft: no alive ions of target species");
    const double offset = offset_fraction * std::sqrt(r2 / static_cast<double>(count));
    for (size_t i = 0; i < state.size(); ++i)
        if (state.alive[i] && state.species[i] == target_species) state.x[i] += offset;

    // record species-averaged x
    struct MeanX : Observer {
        Simulator* sim;
        std::uint32_t species;
        std::size_t stride_;
        std::vector<double> series;
        std::size_t stride() const override { return stride_; }
        void sample(const Simulator& s) override {
            const EnsembleState& st = s.state();
            double m = 0;
            size_t n = 0;
            for (size_t i = 0; i < st.size(); ++i)
                if (st.alive[i] && st.species[i] == species) {
                    m += st.x[i];
                    ++n;
                }
            series.push_back(n ? m / static_cast<double>(n) : 0.0);
        }
    } probe;
    probe.sim = &sim;
    probe.species = target_species;
    probe.stride_ = stride;

    sim.evolve(duration, {&probe});
    Spectrum sp = power_spectrum(probe.series, sim.config().timestep * static_cast<double>(stride));
    return sp;
}

Spectrum spectrum_sweep(const EnsembleState& start, const ForceConfig& base,
                        const CoolingConfig& cooling, const HeatingModel& heating,
                        const SweepPlan& plan, std::uint32_t readout_species) {
    if (plan.points < 2) throw std::invalid_argument("spectrum_sweep: need >= 2 points");
    Spectrum sp;
    sp.method = "sweep-fluorescence-proxy";
    for (std::size_t k = 0; k < plan.points; ++k) {
        const double f = plan.f_start + (plan.f_end - plan.f_start) * static_cast<double>(k) /
                                            static_cast<double>(plan.points - 1);
        ForceConfig cfg = base;
        ExcitationDrive drive;
        drive.amplitude = plan.amplitude;
        drive.frequency = f;
        drive.direction = plan.direction;
        cfg.drive = drive;
        Simulator sim(start, cfg, heating);
        sim.cooling() = cooling;
        if (plan.settle > 0) sim.evolve(plan.settle);
        // average secular kinetic energy of the readout species over the dwell
        struct EnergyProbe : Observer {
            std::uint32_t species;
            std::size_t stride_ = 1;
            double sum = 0;
            std::size_t n = 0;
            std::size_t stride() const override { return stride_; }
            void sample(const Simulator& s) override {
                if (!s.secular_ready()) return;
                const auto e = s.species_energies();
                sum += e[species].kinetic;
                ++n;
            }
        } probe;
        probe.species = readout_species;
        probe.stride_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(plan.dwell / cfg.timestep / 200)));
        sim.evolve(plan.dwell, {&probe});
        if (!std::isfinite(probe.sum))
            throw std::runtime_error("spectrum_sweep: integration unstable (amplitude too high)");
        sp.freq.push_back(f);
        sp.response.push_back(probe.n ? probe.sum / static_cast<double>(probe.n) : 0.0);
    }
    // resonances ride on the thermal baseline; detect peaks on the excess
    std::vector<double> excess = sp.response;
    const double base = *std::min_element(excess.begin(), excess.end());
    for (double& v : excess) v -= base;
    sp.peaks = find_peaks(sp.freq, excess, 5.0);
    return sp;
}

}  // namespace iontrap
