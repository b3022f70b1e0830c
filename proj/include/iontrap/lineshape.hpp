#pragma once

#include <span>
#include <vector>

namespace iontrap {

// Voigt profile: Gaussian (sigma) convolved with Lorentzian (hwhm gamma),
// unit area, evaluated at detuning x from line center.
double voigt(double x, double sigma, double gamma);

struct LineshapeConfig {
    double wavelength = 0;        // m, converts velocity to Doppler shift
    double natural_fwhm_hz = 0;   // Hz, Lorentzian component (held fixed in the fit)
    std::vector<double> scan_hz;  // detuning grid
};

struct LineshapeFit {
    std::vector<double> curve;  // synthetic fluorescence on the scan grid
    double temperature = 0;     // K, from the fitted Gaussian width
    double sigma_hz = 0;        // fitted Doppler sigma
    double center_hz = 0;
    double residual = 0;        // rms of (data - fit)/peak
    bool converged = false;
};

// Synthesizes the fluorescence lineshape from the velocity samples (sum of
// natural-width Lorentzians at the Doppler-shifted frequencies), fits a Voigt
// profile with the Lorentzian width fixed, and converts the Gaussian width to
// a temperature via sigma_v = lambda * sigma_nu, T = m sigma_v^2 / kB.
LineshapeFit lineshape_fit(std::span<const double> velocity_samples, double ion_mass,
                           const LineshapeConfig& config);

}  // namespace iontrap
