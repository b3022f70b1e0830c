#pragma once

#include <string>
#include <vector>

#include "iontrap/simulator.hpp"

namespace iontrap {

struct SpectrumPeak {
    double frequency = 0;  // Hz
    double height = 0;
    double width = 0;  // Hz, fwhm estimate
};

struct Spectrum {
    std::vector<double> freq;      // Hz, strictly increasing
    std::vector<double> response;  // method-tagged units
    std::vector<SpectrumPeak> peaks;
    std::string method;  // "fft-power" or "sweep-fluorescence-proxy"
};

// local maxima above floor_factor x median, quadratically interpolated
std::vector<SpectrumPeak> find_peaks(const std::vector<double>& freq,
                                     const std::vector<double>& response,
                                     double floor_factor = 5.0);

// Hann-windowed power spectrum of a uniformly sampled series (FFT length is
// the series length rounded down to a power of two).
Spectrum power_spectrum(const std::vector<double>& samples, double sample_dt);

// Displace one species radially by offset_fraction of its rms radius, evolve
// freely, Fourier transform the species-averaged x coordinate.
// The evolution must cover >= 10 periods of min_expected_frequency.
Spectrum spectrum_fft(Simulator& sim, std::uint32_t target_species, double offset_fraction,
                      double duration, std::size_t stride, double min_expected_frequency);

struct SweepPlan {
    double f_start = 0, f_end = 0;  // Hz
    std::size_t points = 0;
    double amplitude = 0;  // V/m
    Vec3 direction{1, 0, 0};
    double settle = 0;  // s, discarded before the response window
    double dwell = 0;   // s, response averaging window
};

// For each drive frequency, restart from the given state, drive, and record
// the laser-cooled species' mean secular kinetic energy over the dwell (the
// fluorescence proxy: energy pumped into the motion).
Spectrum spectrum_sweep(const EnsembleState& start, const ForceConfig& base,
                        const CoolingConfig& cooling, const HeatingModel& heating,
                        const SweepPlan& plan, std::uint32_t readout_species);

}  // namespace iontrap
