#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "iontrap/config.hpp"
#include "iontrap/imaging.hpp"
#include "iontrap/output.hpp"
#include "iontrap/rng.hpp"

using namespace iontrap;
using doctest::Approx;

TEST_CASE("counter rng: deterministic, order-free, sane moments") {
    CHECK(rng_uniform(1, RngStream::noise, 2, 3, 4) == rng_uniform(1, RngStream::noise, 2, 3, 4));
    CHECK(rng_uniform(1, RngStream::noise, 2, 3, 4) != rng_uniform(1, RngStream::noise, 2, 3, 5));
    CHECK(rng_uniform(1, RngStream::noise, 2) != rng_uniform(2, RngStream::noise, 2));

    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = rng_gaussian(3, RngStream::noise, i, 0, 0);
        sum += g;
        sum2 += g * g;
    }
    CHECK(sum / n == Approx(0.0).epsilon(0).scale(0.02));
    CHECK(sum2 / n == Approx(1.0).epsilon(0.02));

    // unit vectors have unit norm and vanishing mean
    Vec3 mean{};
    for (int i = 0; i < 20000; ++i) {
        const Vec3 u = rng_unit_vector(3, RngStream::noise, i);
        CHECK(norm(u) == Approx(1.0).epsilon(1e-12));
        mean += u;
    }
    CHECK(norm(mean) / 20000 < 0.02);
}

TEST_CASE("config parser") {
    const char* text = R"(
# comment
[scenario]
name = demo
seed = 42

[species.Be]
count = 100
mass_amu = 9.012

[schedule]
event = 0.0 heat Be 11.55
event = 0.04 cool Be on
)";
    const ConfigFile cfg = ConfigFile::parse_string(text);
    CHECK(cfg.require("scenario").get_string("name") == "demo");
    CHECK(cfg.require("scenario").get_long("seed") == 42);
    CHECK(cfg.require("species.Be").get_double("mass_amu") == Approx(9.012));
    CHECK(cfg.require("schedule").entries.size() == 2);
    CHECK(cfg.with_prefix("species.").size() == 1);
    CHECK(cfg.find("missing") == nullptr);

    CHECK_THROWS_AS(ConfigFile::parse_string("[a]\nbad line\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("key = 1\n"), ConfigError);
    try {
        ConfigFile::parse_string("[a]\nx = 1\nbroken\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_double("abc", 1), ConfigError);
}

TEST_CASE("csv formatting and manifest hashing") {
    CHECK(format_double(1.0) == "1.0000000000000000e+00");
    CHECK(format_double(-0.5) == "-5.0000000000000000e-01");

    const auto dir = std::filesystem::temp_directory_path() / "iontrap_manifest_test";
    std::filesystem::remove_all(dir);
    OutputManifest manifest(dir);
    {
        CsvWriter csv(manifest.record("a.csv"), "x,y");
        csv.row({format_double(1.5), "hello"});
    }
    const std::string body = manifest.render();
    CHECK(body.find("  a.csv\n") != std::string::npos);
    // sha256 of a known string
    CHECK(sha256_hex("abc", 3) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    manifest.write();
    CHECK(std::filesystem::exists(dir / "manifest.txt"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("pgm round trip keeps metadata and relative intensities") {
    CcdImage img;
    img.width = 4;
    img.height = 3;
    img.data = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11.5};
    img.config.view = ViewPlane::zx;
    img.config.pixel_size = 2e-6;
    img.config.width = 4;
    img.config.height = 3;
    img.config.exposure = 1e-3;
    img.config.psf_sigma = 1e-6;
    img.config.brightness = 2.0;
    img.species = "Be+";
    const auto path = std::filesystem::temp_directory_path() / "iontrap_test.pgm";
    write_pgm16(path, img);
    const CcdImage back = read_pgm16(path);
    CHECK(back.width == 4);
    CHECK(back.height == 3);
    CHECK(back.config.pixel_size == Approx(2e-6));
    CHECK(to_string(back.config.view) == "zx");
    CHECK(back.species == "Be+");
    CHECK(image_similarity(img, back) == Approx(1.0).epsilon(1e-6));
    std::filesystem::remove(path);
}
