#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "iontrap/simulator.hpp"

namespace iontrap {

// Per-species N / T / E_kin / E_pot time series (CSV schema
// t_s,species,N,T_mK,E_kin_J,E_pot_J).
class TemperatureProbe : public Observer {
public:
    struct Row {
        double t = 0;
        std::uint32_t species = 0;
        std::size_t count = 0;
        double temperature = 0;  // K
        double e_kin = 0, e_pot = 0;
    };

    explicit TemperatureProbe(std::size_t stride) : stride_(stride) {}
    std::size_t stride() const override { return stride_; }
    void sample(const Simulator& sim) override;
    const std::vector<Row>& rows() const { return rows_; }

    // most recent temperature of one species
    double last_temperature(std::uint32_t species) const;

private:
    std::size_t stride_;
    std::vector<Row> rows_;
};

// Position frames of one species (or all ions) at a fixed stride. Ion order
// within a frame is fixed, so per-ion tracks line up across frames.
class TrajectoryProbe : public Observer {
public:
    struct Frame {
        double t = 0;
        std::vector<Vec3> pos;
    };

    TrajectoryProbe(std::size_t stride, std::optional<std::uint32_t> species_filter)
        : stride_(stride), filter_(species_filter) {}
    std::size_t stride() const override { return stride_; }
    void sample(const Simulator& sim) override;

    const std::vector<Frame>& frames() const { return frames_; }
    const std::vector<std::uint32_t>& ion_ids() const { return ids_; }
    void clear() { frames_.clear(); ids_.clear(); }

    // direct frame injection (synthetic data, file replay)
    void append_frame(double t, std::vector<Vec3> pos) { frames_.push_back({t, std::move(pos)}); }

private:
    std::size_t stride_;
    std::optional<std::uint32_t> filter_;
    std::vector<std::uint32_t> ids_;
    std::vector<Frame> frames_;
};

// Secular velocity samples along one axis for a species (Doppler lineshapes).
class VelocityProbe : public Observer {
public:
    VelocityProbe(std::size_t stride, std::uint32_t species, int axis = 2)
        : stride_(stride), species_(species), axis_(axis) {}
    std::size_t stride() const override { return stride_; }
    void sample(const Simulator& sim) override;
    const std::vector<double>& samples() const { return samples_; }

private:
    std::size_t stride_;
    std::uint32_t species_;
    int axis_;
    std::vector<double> samples_;
};

// Windowed per-species secular temperature. In rf mode the window must span
// at least five rf periods.
class SecularTemperatureProbe : public Observer {
public:
    explicit SecularTemperatureProbe(std::size_t stride) : stride_(stride) {}
    std::size_t stride() const override { return stride_; }
    void sample(const Simulator& sim) override;
    std::vector<double> temperatures() const;  // per species, K

private:
    std::size_t stride_;
    bool rf_mode_ = false;
    std::size_t steps_per_period_ = 0;
    std::uint64_t first_step_ = 0, last_step_ = 0;
    bool any_ = false;
    std::vector<double> sum_v2_;     // per species
    std::vector<double> mass_;       // per species
    std::vector<std::size_t> count_;
};

}  // namespace iontrap
