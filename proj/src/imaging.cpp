#include "iontrap/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iontrap/output.hpp"

namespace iontrap {

ViewPlane view_plane_from_string(const std::string& s) {
    if (s == "zy") return ViewPlane::zy;
    if (s == "zx") return ViewPlane::zx;
    if (s == "xy") return ViewPlane::xy;
    throw std::invalid_argument("unknown view plane: " + s);
}

std::string to_string(ViewPlane v) {
    switch (v) {
        case ViewPlane::zy: return "zy";
        case ViewPlane::zx: return "zx";
        default: return "xy";
    }
}

void ImageConfig::validate() const {
    if (!(pixel_size > 0)) throw std::invalid_argument("image: pixel_size must be > 0");
    if (width <= 0 || height <= 0) throw std::invalid_argument("image: empty dimensions");
    if (!(exposure > 0)) throw std::invalid_argument("image: exposure must be > 0");
    if (psf_sigma < 0) throw std::invalid_argument("image: psf_sigma must be >= 0");
}

double CcdImage::total() const {
    double s = 0;
    for (double v : data) s += v;
    return s;
}

namespace {

inline void project(ViewPlane view, const Vec3& p, double& h, double& v) {
    switch (view) {
        case ViewPlane::zy: h = p.z; v = p.y; break;
        case ViewPlane::zx: h = p.z; v = p.x; break;
        default: h = p.x; v = p.y; break;
    }
}

// normalized 1D Gaussian kernel, radius 4 sigma
std::vector<double> gaussian_kernel(double sigma_px) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

void convolve_separable(CcdImage& img, double sigma_px) {
    const auto k = gaussian_kernel(sigma_px);
    const int radius = (static_cast<int>(k.size()) - 1) / 2;
    std::vector<double> tmp(img.data.size(), 0.0);
    // horizontal
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            const double v = img.at(r, c);
            if (v == 0) continue;
            for (int d = -radius; d <= radius; ++d) {
                const int cc = c + d;
                if (cc >= 0 && cc < img.width)
                    tmp[static_cast<size_t>(r) * img.width + cc] += v * k[d + radius];
            }
        }
    // vertical
    std::fill(img.data.begin(), img.data.end(), 0.0);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            const double v = tmp[static_cast<size_t>(r) * img.width + c];
            if (v == 0) continue;
            for (int d = -radius; d <= radius; ++d) {
                const int rr = r + d;
                if (rr >= 0 && rr < img.height) img.at(rr, c) += v * k[d + radius];
            }
        }
}

}  // namespace

CcdImage render_ccd(const TrajectoryProbe& samples, const ImageConfig& config,
                    const std::string& species_label) {
    config.validate();
    if (samples.frames().empty()) throw std::invalid_argument("render_ccd: empty sample set");
    CcdImage img;
    img.width = config.width;
    img.height = config.height;
    img.data.assign(static_cast<size_t>(config.width) * config.height, 0.0);
    img.config = config;
    img.species = species_label;
    img.t_begin = samples.frames().front().t;
    img.t_end = samples.frames().back().t;

    const double cx = 0.5 * config.width, cy = 0.5 * config.height;
    for (const auto& frame : samples.frames()) {
        for (const Vec3& p : frame.pos) {
            double h = 0, v = 0;
            project(config.view, p, h, v);
            const int col = static_cast<int>(std::floor(h / config.pixel_size + cx));
            const int row = static_cast<int>(std::floor(v / config.pixel_size + cy));
            if (col >= 0 && col < img.width && row >= 0 && row < img.height)
                img.at(row, col) += config.brightness;
        }
    }
    if (config.psf_sigma > 0) convolve_separable(img, config.psf_sigma / config.pixel_size);
    return img;
}

double image_similarity(const CcdImage& a, const CcdImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("image_similarity: dimension mismatch");
    const size_t n = a.data.size();
    double ma = 0, mb = 0;
    for (size_t i = 0; i < n; ++i) {
        ma += a.data[i];
        mb += b.data[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a.data[i] - ma, db = b.data[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

void write_pgm16(const std::filesystem::path& path, const CcdImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    double peak = 0;
    for (double v : image.data) peak = std::max(peak, v);
    const double scale = peak > 0 ? 65535.0 / peak : 0.0;
    std::ostringstream meta;
    meta << "# view=" << to_string(image.config.view)
         << ";pixel_size=" << format_double(image.config.pixel_size)
         << ";exposure=" << format_double(image.config.exposure)
         << ";psf_sigma=" << format_double(image.config.psf_sigma)
         << ";brightness=" << format_double(image.config.brightness)
         << ";species=" << image.species << ";t_begin=" << format_double(image.t_begin)
         << ";t_end=" << format_double(image.t_end) << ";scale=" << format_double(scale);
    out << "P5\n" << meta.str() << "\n" << image.width << " " << image.height << "\n65535\n";
    for (double v : image.data) {
        const auto s = static_cast<unsigned>(std::lround(std::clamp(v * scale, 0.0, 65535.0)));
        out.put(static_cast<char>((s >> 8) & 0xff));
        out.put(static_cast<char>(s & 0xff));
    }
}

CcdImage read_pgm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + path.string());
    in.get();  // newline

    CcdImage img;
    std::string line;
    // tokens with optional comment lines in between
    std::vector<std::string> tokens;
    std::string meta;
    while (tokens.size() < 3 && std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            meta = line.substr(2);
            continue;
        }
        std::istringstream ss(line);
        std::string t;
        while (ss >> t) tokens.push_back(t);
    }
    if (tokens.size() < 3) throw std::runtime_error("truncated PGM header");
    img.width = std::stoi(tokens[0]);
    img.height = std::stoi(tokens[1]);
    const int maxval = std::stoi(tokens[2]);
    if (maxval != 65535) throw std::runtime_error("expected 16-bit PGM");

    // metadata key=value;...
    std::map<std::string, std::string> kv;
    std::istringstream ms(meta);
    std::string item;
    while (std::getline(ms, item, ';')) {
        const size_t eq = item.find('=');
        if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    auto getd = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };
    if (kv.count("view")) img.config.view = view_plane_from_string(kv["view"]);
    img.config.width = img.width;
    img.config.height = img.height;
    img.config.pixel_size = getd("pixel_size", 1.0);
    img.config.exposure = getd("exposure", 1.0);
    img.config.psf_sigma = getd("psf_sigma", 0.0);
    img.config.brightness = getd("brightness", 1.0);
    img.species = kv.count("species") ? kv["species"] : "";
    img.t_begin = getd("t_begin", 0.0);
    img.t_end = getd("t_end", 0.0);
    const double scale = getd("scale", 1.0);

    img.data.resize(static_cast<size_t>(img.width) * img.height);
    for (double& v : img.data) {
        const int hi = in.get(), lo = in.get();
        if (hi < 0 || lo < 0) throw std::runtime_error("truncated PGM data");
        const unsigned s = (static_cast<unsigned>(hi) << 8) | static_cast<unsigned>(lo);
        v = scale > 0 ? s / scale : s;
    }
    return img;
}

}  // namespace iontrap
