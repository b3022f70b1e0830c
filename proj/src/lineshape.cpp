#include "iontrap/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "iontrap/constants.hpp"

namespace iontrap {

using namespace constants;

namespace {

// Complex probability function w(z) = exp(-z^2) erfc(-iz), Im(z) >= 0,
// Humlicek's four-region rational approximation (relative error ~ 1e-4).
std::complex<double> faddeeva(std::complex<double> z) {
    const double s = std::abs(z.real()) + z.imag();
    const std::complex<double> t(z.imag(), -z.real());  // t = -i z
    if (s >= 15.0) {
        return t * 0.5641896 / (0.5 + t * t);
    }
    if (s >= 5.5) {
        const std::complex<double> u = t * t;
        return t * (1.410474 + u * 0.5641896) / (0.75 + u * (3.0 + u));
    }
    if (z.imag() >= 0.195 * std::abs(z.real()) - 0.176) {
        return (16.4955 + t * (20.20933 + t * (11.96482 + t * (3.778987 + t * 0.5642236)))) /
               (16.4955 + t * (38.82363 + t * (39.27121 + t * (21.69274 + t * (6.699398 + t)))));
    }
    const std::complex<double> u = t * t;
    const std::complex<double> num =
        t * (36183.31 - u * (3321.9905 - u * (1540.787 - u * (219.0313 - u * (35.76683 -
            u * (1.320522 - u * 0.56419))))));
    const std::complex<double> den =
        32066.6 - u * (24322.84 - u * (9022.228 - u * (2186.181 - u * (364.2191 -
            u * (61.57037 - u * (1.841439 - u))))));
    return std::exp(u) - num / den;
}

}  // namespace

double voigt(double x, double sigma, double gamma) {
    if (sigma <= 0) {
        // pure Lorentzian
        return gamma / (pi * (x * x + gamma * gamma));
    }
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    const std::complex<double> z(x * inv, gamma * inv);
    return faddeeva(z).real() * inv / std::sqrt(pi);
}

LineshapeFit lineshape_fit(std::span<const double> velocity_samples, double ion_mass,
                           const LineshapeConfig& config) {
    if (velocity_samples.empty()) throw std::invalid_argument("lineshape_fit: no samples");
    if (!(config.wavelength > 0) || !(config.natural_fwhm_hz > 0) || config.scan_hz.size() < 5)
        throw std::invalid_argument("lineshape_fit: bad configuration");

    const double gamma = 0.5 * config.natural_fwhm_hz;  // Lorentzian hwhm
    LineshapeFit fit;

    // synthetic curve: mean of Lorentzians at the Doppler-shifted frequencies
    fit.curve.assign(config.scan_hz.size(), 0.0);
    for (const double v : velocity_samples) {
        const double shift = v / config.wavelength;
        for (size_t k = 0; k < config.scan_hz.size(); ++k) {
            const double d = config.scan_hz[k] - shift;
            fit.curve[k] += gamma / (pi * (d * d + gamma * gamma));
        }
    }
    for (double& v : fit.curve) v /= static_cast<double>(velocity_samples.size());

    // fit amplitude analytically, search (sigma, center) by Nelder-Mead
    auto cost = [&](double sigma, double center) {
        double sy = 0, sm = 0, smm = 0;
        std::vector<double> model(config.scan_hz.size());
        for (size_t k = 0; k < config.scan_hz.size(); ++k) {
            model[k] = voigt(config.scan_hz[k] - center, sigma, gamma);
            sy += fit.curve[k] * model[k];
            sm += model[k];
            smm += model[k] * model[k];
        }
        const double amp = smm > 0 ? sy / smm : 0.0;
        (void)sm;
        double r2 = 0;
        for (size_t k = 0; k < config.scan_hz.size(); ++k) {
            const double d = fit.curve[k] - amp * model[k];
            r2 += d * d;
        }
        return r2;
    };

    // initial guesses: moment-based sigma, zero center
    double vbar = 0;
    for (double v : velocity_samples) vbar += v;
    vbar /= static_cast<double>(velocity_samples.size());
    double v2 = 0;
    for (double v : velocity_samples) v2 += (v - vbar) * (v - vbar);
    v2 /= static_cast<double>(velocity_samples.size());
    const double sigma0 = std::max(std::sqrt(v2) / config.wavelength, 0.01 * gamma);

    // Nelder-Mead on (log sigma, center)
    struct P {
        double a, b, f;
    };
    auto eval = [&](double a, double b) { return cost(std::exp(a), b); };
    P simplex[3] = {{std::log(sigma0), 0, 0},
                    {std::log(sigma0) + 0.3, 0, 0},
                    {std::log(sigma0), 0.2 * gamma, 0}};
    for (auto& p : simplex) p.f = eval(p.a, p.b);
    for (int iter = 0; iter < 200; ++iter) {
        std::sort(std::begin(simplex), std::end(simplex),
                  [](const P& x, const P& y) { return x.f < y.f; });
        if (std::abs(simplex[2].f - simplex[0].f) <=
            1e-12 * (std::abs(simplex[0].f) + 1e-300))
            break;
        const double ca = 0.5 * (simplex[0].a + simplex[1].a);
        const double cb = 0.5 * (simplex[0].b + simplex[1].b);
        const double ra = ca + (ca - simplex[2].a), rb = cb + (cb - simplex[2].b);
        const double fr = eval(ra, rb);
        if (fr < simplex[0].f) {
            const double ea = ca + 2 * (ca - simplex[2].a), eb = cb + 2 * (cb - simplex[2].b);
            const double fe = eval(ea, eb);
            simplex[2] = fe < fr ? P{ea, eb, fe} : P{ra, rb, fr};
        } else if (fr < simplex[1].f) {
            simplex[2] = {ra, rb, fr};
        } else {
            const double ka = ca + 0.5 * (simplex[2].a - ca), kb = cb + 0.5 * (simplex[2].b - cb);
            const double fk = eval(ka, kb);
            if (fk < simplex[2].f) {
                simplex[2] = {ka, kb, fk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].a = 0.5 * (simplex[i].a + simplex[0].a);
                    simplex[i].b = 0.5 * (simplex[i].b + simplex[0].b);
                    simplex[i].f = eval(simplex[i].a, simplex[i].b);
                }
            }
        }
    }
    std::sort(std::begin(simplex), std::end(simplex),
              [](const P& x, const P& y) { return x.f < y.f; });

    fit.sigma_hz = std::exp(simplex[0].a);
    fit.center_hz = simplex[0].b;
    const double sigma_v = fit.sigma_hz * config.wavelength;
    fit.temperature = ion_mass * sigma_v * sigma_v / k_boltzmann;

    double peak = 0;
    for (double v : fit.curve) peak = std::max(peak, v);
    fit.residual = peak > 0 ? std::sqrt(simplex[0].f / static_cast<double>(fit.curve.size())) / peak
                            : 0.0;
    fit.converged = fit.residual < 0.05;
    return fit;
}

}  // namespace iontrap
