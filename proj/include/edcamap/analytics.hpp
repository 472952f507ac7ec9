#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace edcamap {

inline constexpr std::size_t kNumAcs = 4;

template <typename T>
using PerAc = std::array<T, kNumAcs>;

/// 802.11a PHY/MAC timing constants. Durations are in microseconds, rates in
/// bits per second.
struct PhyMacParams {
    double sifs_us = 16.0;
    double slot_time_us = 9.0;
    int ack_size_bytes = 14;
    double phy_rate_bps = 6e6;
    double control_rate_bps = 6e6;
    double t_phy_us = 4.0;
    double t_sym_us = 4.0;
    double t_preamble_us = 16.0;
    double prop_delay_us = 1.0;
    int mac_header_bytes = 28;

    void validate() const;
};

/// EDCA parameters of one access category.
struct AcConfig {
    int cw_min = 15;
    int cw_max = 1023;
    int aifsn = 2;
    int retry_limit = 7;
    /// Packets sent per channel access beyond the first.
    int txop_packets = 0;
    /// Inactive categories never contend (tau = 0).
    bool active = true;

    void validate() const;
};

/// Default EDCA parameter set, AC_1 (highest priority) first.
PerAc<AcConfig> default_ac_configs();

struct Scenario {
    int n_stations = 10;
    PerAc<AcConfig> ac_configs = default_ac_configs();
    int packet_length_bytes = 1024;
    int queue_capacity = 50;
    int layer_count = 8;
    /// Packets per second generated by each video layer.
    double per_layer_rate = 0.0;
    PhyMacParams phy;

    void validate() const;
    /// Sets txop_packets of every access category.
    void set_txop(int txop_packets);
};

struct AcSolution {
    double tau = 0.0;
    double p_busy_around = 0.0;
    double b000 = 0.0;
    double p_coll = 0.0;
    double p_succ = 0.0;
    double throughput_bps = 0.0;
    /// Infinite for a category with zero throughput.
    double access_delay_s = 0.0;
    double p_drop_retry = 0.0;
    double payload_per_access_bits = 0.0;
};

struct SystemSolution {
    PerAc<AcSolution> per_ac{};
    double station_tau = 0.0;
    double p_busy = 0.0;
    double p_succ_total = 0.0;
    double p_coll_total = 0.0;
    PerAc<double> t_success_us{};
    double t_collision_us = 0.0;

    double residual = 0.0;
    int iterations = 0;
    std::vector<std::string> diagnostics;
};

struct FrameTimings {
    double t_data_us = 0.0;
    double t_ack_us = 0.0;
    double aifs_us = 0.0;
    double t_success_us = 0.0;
    double t_collision_us = 0.0;
};

struct SolverOptions {
    double damping = 0.5;
    int max_iterations = 10000;
    double tolerance = 1e-10;
};

// Backoff chain -------------------------------------------------------------

/// Contention window per backoff stage, W_0 = cw_min + 1 doubling up to
/// cw_max + 1, one entry per transmission attempt.
std::vector<int> backoff_window_schedule(const AcConfig& cfg);

/// Stationary probability of the first backoff state of the chain.
double initial_state_prob(double p, std::span<const int> schedule);

double ac_transmit_prob(double b000, double p, int retry_limit);

double station_transmit_prob(std::span<const double> taus);

/// Collision probability seen by an access category: external collisions
/// with the other N - 1 stations plus internal ones with higher-priority
/// categories of the same station.
double ac_collision_prob(double station_tau, int n_stations, std::span<const double> higher_priority_taus);

/// Solves the coupled (tau_i, p_i) system by damped successive substitution
/// and fills in every derived metric. Throws SolverError on non-convergence.
SystemSolution solve_fixed_point(const Scenario& scenario, const SolverOptions& options = {});

// Metrics -------------------------------------------------------------------

/// N * tau_i * (1 - p_coll_i), clamped to [0, 1].
double success_prob(double tau_i, double p_coll_i, int n_stations);

double aifs_duration_us(const PhyMacParams& phy, const AcConfig& ac);

FrameTimings frame_timings(const PhyMacParams& phy, const AcConfig& ac, int packet_length_bytes);

double saturation_throughput(const SystemSolution& sol, std::size_t ac_index, const Scenario& scenario);

/// Throws StarvedClassError when throughput is zero.
double access_delay(double payload_per_access_bits, double throughput_bps);

double retry_drop_prob(double p, int retry_limit);

double offered_load(double lambda, double delay_s);

/// Blocking probability of an M/M/1/K queue. Continuous at rho = 1.
double queue_drop_prob(double rho, int capacity);

double total_drop_prob(double p_retry_drop, double p_queue_drop);

} // namespace edcamap
