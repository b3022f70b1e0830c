#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iontrap/output.hpp"
#include "iontrap/scenario.hpp"

using namespace iontrap;

namespace {

const char* kMinimal = R"(
[scenario]
name = minimal
seed = 7

[trap]
preset = be

[species.Be]
preset = Be+
count = 12

[init]
temperature_k = 0.005
relax_time_s = 0.0002
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate: clean config, stability warning, missing trap") {
    const ConfigFile cfg = ConfigFile::parse_string(kMinimal);
    CHECK(validate_scenario(cfg).empty());

    // unstable species: crank the drive so q > 0.9
    std::string hot = kMinimal;
    hot.replace(hot.find("preset = be"), 11, "preset = be\nv_rf = 7000");
    const auto diags = validate_scenario(ConfigFile::parse_string(hot));
    REQUIRE(!diags.empty());
    CHECK(diags[0].severity == Diagnostic::Severity::warning);
    CHECK(diags[0].message.find("Be") != std::string::npos);
    CHECK(diags[0].message.find("Mathieu") != std::string::npos);

    // missing trap section: error diagnostic
    const char* no_trap = "[scenario]\nseed = 1\n[species.X]\nmass_amu = 9\ncharge_e = 1\ncount = 1\n";
    const auto errs = validate_scenario(ConfigFile::parse_string(no_trap));
    REQUIRE(!errs.empty());
    CHECK(errs[0].severity == Diagnostic::Severity::error);

    // schedule times must be non-decreasing
    std::string bad_sched = std::string(kMinimal) +
                            "[schedule]\nevent = 0.002 heat Be 1\nevent = 0.001 heat Be 0\n";
    const auto sched_diags = validate_scenario(ConfigFile::parse_string(bad_sched));
    REQUIRE(!sched_diags.empty());
    CHECK(sched_diags[0].message.find("non-decreasing") != std::string::npos);

    // unknown species referenced by the schedule
    std::string bad_species =
        std::string(kMinimal) + "[schedule]\nevent = 0.001 heat Nope 1\n";
    const auto sp_diags = validate_scenario(ConfigFile::parse_string(bad_species));
    REQUIRE(!sp_diags.empty());
    CHECK(sp_diags[0].message.find("Nope") != std::string::npos);
}

TEST_CASE("run: empty schedule yields a success manifest with zero data files") {
    const auto dir = std::filesystem::temp_directory_path() / "iontrap_run_empty";
    std::filesystem::remove_all(dir);
    RunOptions opt;
    opt.out_dir = dir;
    const ConfigFile cfg = ConfigFile::parse_string(kMinimal);
    CHECK(run_scenario(cfg, opt) == 0);
    CHECK(slurp(dir / "manifest.txt").empty());
    std::filesystem::remove_all(dir);
}

TEST_CASE("run: same seed is byte-identical, different seed is not") {
    const std::string with_outputs = std::string(kMinimal) + R"(
[heating]
Be = 3.0

[outputs]
timeseries = temps.csv
timeseries_stride_s = 5e-5
snapshot = final.csv

[schedule]
end = 0.0008
)";
    const ConfigFile cfg = ConfigFile::parse_string(with_outputs);
    const auto base = std::filesystem::temp_directory_path();
    RunOptions a, b, c;
    a.out_dir = base / "iontrap_run_a";
    b.out_dir = base / "iontrap_run_b";
    c.out_dir = base / "iontrap_run_c";
    c.seed = 8;
    for (const auto& o : {a, b, c}) std::filesystem::remove_all(o.out_dir);
    CHECK(run_scenario(cfg, a) == 0);
    CHECK(run_scenario(cfg, b) == 0);
    CHECK(run_scenario(cfg, c) == 0);
    CHECK(slurp(a.out_dir / "manifest.txt") == slurp(b.out_dir / "manifest.txt"));
    CHECK(slurp(a.out_dir / "manifest.txt") != slurp(c.out_dir / "manifest.txt"));
    CHECK(slurp(a.out_dir / "temps.csv") == slurp(b.out_dir / "temps.csv"));
    // every output file appears in the manifest
    const std::string manifest = slurp(a.out_dir / "manifest.txt");
    CHECK(manifest.find("  temps.csv\n") != std::string::npos);
    CHECK(manifest.find("  final.csv\n") != std::string::npos);
    for (const auto& o : {a, b, c}) std::filesystem::remove_all(o.out_dir);
}

TEST_CASE("malformed config: line-numbered diagnostics") {
    try {
        ConfigFile::parse_string("[scenario]\nseed == 1 = 2\n");
    } catch (const ConfigError& e) {
        CHECK(e.line == 0);  // parse succeeded: '=' splits at first occurrence
    }
    // an actually malformed line
    CHECK_THROWS_AS(ConfigFile::parse_string("[scenario]\njust words\n"), ConfigError);

    // missing seed surfaces as an error with the section line
    const char* no_seed = "[scenario]\nname = x\n[trap]\npreset = be\n[species.A]\npreset = Be+\ncount = 1\n";
    const auto diags = validate_scenario(ConfigFile::parse_string(no_seed));
    REQUIRE(!diags.empty());
    CHECK(diags[0].message.find("seed") != std::string::npos);
}

TEST_CASE("trap subcommand prints the parameter table") {
    const ConfigFile cfg = ConfigFile::parse_string(kMinimal);
    std::ostringstream out;
    CHECK(run_trap_report(cfg, out) == 0);
    const std::string table = out.str();
    CHECK(table.find("Be") != std::string::npos);
    CHECK(table.find("f_r[kHz]") != std::string::npos);
    CHECK(table.find("280") != std::string::npos);
}
