#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "iontrap/observers.hpp"

namespace iontrap {

enum class ViewPlane { zy, zx, xy };

ViewPlane view_plane_from_string(const std::string& s);
std::string to_string(ViewPlane v);

struct ImageConfig {
    ViewPlane view = ViewPlane::zy;
    double pixel_size = 0;   // m
    int width = 0, height = 0;
    double exposure = 0;     // s
    double psf_sigma = 0;    // m, Gaussian optical blur
    double brightness = 1;   // counts per ion sample

    void validate() const;
};

struct CcdImage {
    int width = 0, height = 0;
    std::vector<double> data;  // row-major, intensities >= 0
    ImageConfig config;
    std::string species;
    double t_begin = 0, t_end = 0;

    double& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
    double total() const;
};

// Time-integrated projection of trajectory samples onto the view plane,
// convolved with the Gaussian point-spread function. Horizontal axis of the
// image is the first letter of the view name, centered on the trap center.
CcdImage render_ccd(const TrajectoryProbe& samples, const ImageConfig& config,
                    const std::string& species_label = "");

// Normalized cross-correlation after mean subtraction, in [-1, 1];
// 1 = identical up to affine intensity scaling. Throws on dimension mismatch.
double image_similarity(const CcdImage& a, const CcdImage& b);

// 16-bit big-endian binary PGM with one metadata comment line
void write_pgm16(const std::filesystem::path& path, const CcdImage& image);
CcdImage read_pgm16(const std::filesystem::path& path);

}  // namespace iontrap
