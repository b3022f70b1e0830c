#include <doctest.h>

#include <cmath>
#include <map>

#include "iontrap/constants.hpp"
#include "iontrap/reactions.hpp"
#include "iontrap/rng.hpp"

using namespace iontrap;
using namespace iontrap::constants;
using doctest::Approx;

namespace {

EnsembleState flat_state(const std::vector<IonSpecies>& table,
                         const std::vector<std::pair<std::uint32_t, long>>& counts,
                         std::uint64_t seed) {
    EnsembleState s;
    s.species_table = table;
    s.seed = seed;
    for (const auto& [sp, n] : counts)
        for (long k = 0; k < n; ++k) s.append_ion(sp, {}, {});
    return s;
}

}  // namespace

TEST_CASE("channel rates") {
    const PresetLibrary lib = PresetLibrary::load_default();
    ChannelLibrary chem = channel_library(lib);

    // fixed-rate Be+HD at 1e-9 mbar, 300 K: ~2.7e-2 per ion and second
    ReactionChannel& behd = chem.channel("Be+HD");
    auto& gas = std::get<NeutralGas>(behd.trigger);
    gas.pressure = 1e-7;
    gas.temperature = 300;
    behd.rate_model = ReactionChannel::RateModel::fixed;
    behd.fixed_k = 1.1e-15;  // m^3/s
    CHECK(channel_rate(behd, chem.species) == Approx(2.656e-2).epsilon(1e-3));

    // photoactivation gate: closed gate means no reaction
    behd.gate = 0.0;
    CHECK(channel_rate(behd, chem.species) == 0.0);
    behd.gate = 1.0;

    // photon trigger with zero intensity
    ReactionChannel& photo = chem.channel("photodestruction");
    CHECK(channel_rate(photo, chem.species) == 0.0);
    std::get<PhotonField>(photo.trigger).intensity = 100.0;
    CHECK(channel_rate(photo, chem.species) > 0.0);

    // every library channel conserves charge
    for (const auto& ch : chem.channels) {
        for (const auto& b : ch.branches)
            CHECK(chem.species[b.product].charge == chem.species[ch.reactant].charge);
    }
}

TEST_CASE("step_reactions mechanics") {
    const PresetLibrary lib = PresetLibrary::load_default();
    ChannelLibrary chem = channel_library(lib);
    ReactionChannel behd = chem.channel("Be+HD");
    std::get<NeutralGas>(behd.trigger).pressure = 1e-7;
    behd.rate_model = ReactionChannel::RateModel::fixed;
    behd.fixed_k = 1.1e-15;

    EnsembleState s = flat_state(chem.species, {{chem.species_index("Be+"), 2000}}, 5);

    // zero channels: untouched state, empty event list
    const auto none = step_reactions(s, 1.0, {});
    CHECK(none.events.empty());

    // branching: BeH+ and BeD+ in equal amounts within binomial error
    std::map<std::uint32_t, int> produced;
    double t = 0;
    const std::vector<ReactionChannel> channels = {behd};
    int fired = 0;
    while (fired < 1200 && t < 1e4) {
        auto res = step_reactions(s, 1.0, channels);
        for (const auto& e : res.events) {
            ++produced[e.product];
            ++fired;
        }
        t += 1.0;
        ++s.step_index;
    }
    const int nh = produced[chem.species_index("BeH+")];
    const int nd = produced[chem.species_index("BeD+")];
    const int n = nh + nd;
    REQUIRE(n >= 1200);
    // 4-sigma binomial band
    CHECK(std::abs(nh - n / 2.0) < 4.0 * std::sqrt(n * 0.25));

    // ion count is conserved by non-destructive channels
    CHECK(s.alive_count() == 2000);

    // momentum conservation and energy partition per event
    EnsembleState s2 = flat_state(chem.species, {{chem.species_index("H3+"), 400}}, 9);
    for (std::size_t i = 0; i < s2.size(); ++i) {
        s2.vx[i] = 10.0;
        s2.vy[i] = -3.0;
        s2.vz[i] = 1.0;
    }
    ReactionChannel h3hd = chem.channel("H3+HD");
    std::get<NeutralGas>(h3hd.trigger).pressure = 2e-5;
    const double m_pre = chem.species[h3hd.reactant].mass;
    const std::vector<ReactionChannel> channels2 = {h3hd};
    auto res = step_reactions(s2, 1.0, channels2);
    REQUIRE(res.events.size() > 5);
    for (const auto& e : res.events) {
        const double m_ion = s2.species_table[e.product].mass;
        const Vec3 p_ion = m_ion * s2.velocity(e.ion);
        const Vec3 p_b = e.byproduct_mass * e.byproduct_velocity;
        const Vec3 p_pre = m_pre * Vec3{10.0, -3.0, 1.0};
        CHECK(norm(p_ion + p_b - p_pre) / norm(p_pre) < 1e-12);
        // energy partition in the moving frame: byproduct carries m_ion/(m_ion+m_b)
        const Vec3 w = (m_pre / (m_ion + e.byproduct_mass)) * Vec3{10.0, -3.0, 1.0};
        const double e_b = 0.5 * e.byproduct_mass * norm2(e.byproduct_velocity - w);
        const double e_i = 0.5 * m_ion * norm2(s2.velocity(e.ion) - w);
        CHECK(e_b / (e_b + e_i) == Approx(m_ion / (m_ion + e.byproduct_mass)).epsilon(1e-9));
        CHECK(e_b + e_i == Approx(232.0 * k_boltzmann).epsilon(1e-9));
    }

    // rate warning when dt * rate > 0.1
    ReactionChannel hot = behd;
    hot.fixed_k = 1.1e-12;
    const std::vector<ReactionChannel> channels3 = {hot};
    EnsembleState s3 = flat_state(chem.species, {{chem.species_index("Be+"), 10}}, 7);
    CHECK(step_reactions(s3, 10.0, channels3).rate_warning);
}

TEST_CASE("event statistics are Poisson (chi-square at 1%)") {
    const PresetLibrary lib = PresetLibrary::load_default();
    ChannelLibrary chem = channel_library(lib);
    ReactionChannel ch = chem.channel("H2+H2");
    auto& gas = std::get<NeutralGas>(ch.trigger);
    gas.pressure = 1e-7;
    ch.rate_model = ReactionChannel::RateModel::fixed;
    // rate chosen for lambda = 5 per window
    const double rate = 0.5;  // 1/s per ion
    ch.fixed_k = rate / gas.number_density();

    // self-regenerating population: product swapped back so M stays constant
    const std::uint32_t h2 = chem.species_index("H2+");
    EnsembleState s = flat_state(chem.species, {{h2, 100}}, 31);
    const std::vector<ReactionChannel> channels = {ch};
    const double dt = 1e-3;  // rate*dt = 5e-4, binomial ~ Poisson
    const int windows = 2000;
    const int steps_per_window = 100;  // window = 0.1 s, lambda = 5
    std::vector<int> counts(windows, 0);
    for (int w = 0; w < windows; ++w) {
        for (int k = 0; k < steps_per_window; ++k) {
            auto res = step_reactions(s, dt, channels);
            counts[w] += static_cast<int>(res.events.size());
            for (const auto& e : res.events) s.set_species(e.ion, h2);
            ++s.step_index;
        }
    }
    int total = 0;
    for (int c : counts) total += c;
    REQUIRE(total > 9000);

    const double lambda = 100.0 * rate * dt * steps_per_window;
    // chi-square over binned counts, tails pooled to keep expectations >= 5
    std::vector<double> expected;
    std::vector<int> observed;
    double p = std::exp(-lambda);
    double cum_p = 0;
    int k = 0;
    std::map<int, int> hist;
    for (int c : counts) ++hist[c];
    int pooled_obs = 0;
    double pooled_exp = 0;
    while (cum_p < 1 - 1e-9) {
        const double e = windows * p;
        const int o = hist.count(k) ? hist[k] : 0;
        pooled_obs += o;
        pooled_exp += e;
        if (pooled_exp >= 5.0) {
            observed.push_back(pooled_obs);
            expected.push_back(pooled_exp);
            pooled_obs = 0;
            pooled_exp = 0;
        }
        cum_p += p;
        ++k;
        p *= lambda / k;
        if (k > 200) break;
    }
    if (pooled_exp > 0) {
        observed.back() += pooled_obs;
        expected.back() += pooled_exp;
    }
    double chi2 = 0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        const double d = observed[b] - expected[b];
        chi2 += d * d / expected[b];
    }
    // dof ~ bins - 1; 1% critical value for the realized bin count
    const double dof = static_cast<double>(expected.size()) - 1.0;
    const double critical = dof + 2.33 * std::sqrt(2 * dof) + 2.0;  // Wilson-Hilferty-ish
    CHECK(chi2 < critical);
}

TEST_CASE("fit_decay") {
    // exact exponential: machine-precision recovery
    std::vector<double> t, n;
    for (int i = 0; i < 40; ++i) {
        t.push_back(i * 2.0);
        n.push_back(160.0 * std::exp(-0.031 * t.back()));
    }
    const DecayFit f = fit_decay(t, n, 2.4143e13);
    CHECK(f.gamma == Approx(0.031).epsilon(1e-12));
    CHECK(f.k == Approx(0.031 / 2.4143e13).epsilon(1e-12));

    // constant series: gamma = 0
    std::vector<double> flat(12, 100.0), tf;
    for (int i = 0; i < 12; ++i) tf.push_back(i);
    CHECK(fit_decay(tf, flat, 1e13).gamma == Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_decay(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 1.0),
                    std::invalid_argument);
}
