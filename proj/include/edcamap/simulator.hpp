#pragma once

#include "edcamap/analytics.hpp"
#include "edcamap/mapping.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace edcamap {

struct SimConfig {
    Scenario scenario;
    MappingVector mapping;
    std::uint64_t seed = 1;
    double sim_duration_s = 60.0;
    double gop_duration_s = 1.0;
    double warmup_fraction = 0.1;
    /// Every active category of every station always has a packet queued.
    /// Arrivals, queue limits and GOP accounting are bypassed.
    bool saturated = false;
    /// One line per MAC event when set: "<time_us> <station> <ac> <event>".
    std::ostream* trace = nullptr;

    void validate() const;
};

struct AcStats {
    /// Packets counted by arrival time inside the measurement window.
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t retry_drops = 0;
    std::uint64_t queue_drops = 0;
    /// Attempt counters inside the measurement window.
    std::uint64_t transmissions = 0;
    std::uint64_t collided_attempts = 0;
    std::uint64_t internal_collisions = 0;
    double throughput_bps = 0.0;
    /// Head-of-line to ACK; infinite when packets were offered but none got through.
    double mean_access_delay_s = 0.0;

    bool operator==(const AcStats&) const = default;
};

struct SimStats {
    PerAc<AcStats> per_ac{};
    /// Index u counts station GOPs with exactly u useful layers.
    std::vector<std::uint64_t> useful_layer_histogram;
    /// Fraction of measured GOPs in which each layer was fully delivered.
    std::vector<double> layer_delivery_ratio;
    double avg_useful_layers = 0.0;
    bool no_traffic = false;
    double measured_duration_s = 0.0;
    /// Largest number of categories of one station on air in the same slot.
    int max_station_transmitters = 0;

    std::uint64_t gop_count() const;

    bool operator==(const SimStats&) const = default;
};

SimStats run_simulation(const SimConfig& cfg);

/// Number of leading layers delivered, i.e. the useful layers of one GOP.
std::size_t useful_prefix(const std::vector<bool>& layer_delivered);

/// Mean of the useful-layer histogram. Throws InsufficientDataError when no
/// GOP was measured.
double measure_useful_layers(const SimStats& stats);

} // namespace edcamap
