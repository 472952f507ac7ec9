#include "edcamap/analytics.hpp"

#include "edcamap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace edcamap {

namespace {

void require(bool condition, const char* message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

double ipow(double base, int exponent) {
    // 0^0 = 1
    double result = 1.0;
    for (int i = 0; i < exponent; ++i) {
        result *= base;
    }
    return result;
}

double ofdm_duration_us(const PhyMacParams& phy, double payload_bits, double rate_bps) {
    const double bits_per_symbol = rate_bps * phy.t_sym_us * 1e-6;
    // 16 service bits + 6 tail bits
    const double symbols = std::ceil((16.0 + 6.0 + payload_bits) / bits_per_symbol - 1e-9);
    return phy.t_preamble_us + phy.t_phy_us + phy.t_sym_us * symbols;
}

} // namespace

void PhyMacParams::validate() const {
    require(sifs_us > 0 && slot_time_us > 0 && t_phy_us > 0 && t_sym_us > 0 && t_preamble_us > 0 &&
                prop_delay_us > 0,
            "PHY durations must be positive");
    require(phy_rate_bps > 0 && control_rate_bps > 0, "PHY rates must be positive");
    require(ack_size_bytes >= 0 && mac_header_bytes >= 0, "frame sizes must be non-negative");
}

void AcConfig::validate() const {
    require(cw_min > 0 && cw_min <= cw_max, "require 0 < cw_min <= cw_max");
    require(retry_limit >= 0, "retry_limit must be >= 0");
    require(aifsn >= 1, "aifsn must be >= 1");
    require(txop_packets >= 0, "txop_packets must be >= 0");
}

PerAc<AcConfig> default_ac_configs() {
    return {{
        {7, 15, 2, 7, 0, true},
        {15, 31, 2, 7, 0, true},
        {31, 1023, 3, 7, 0, true},
        {31, 1023, 7, 4, 0, true},
    }};
}

void Scenario::validate() const {
    require(n_stations >= 1, "n_stations must be >= 1");
    require(layer_count >= 1, "layer_count must be >= 1");
    require(queue_capacity >= 1, "queue_capacity must be >= 1");
    require(per_layer_rate >= 0 && std::isfinite(per_layer_rate), "per_layer_rate must be finite and >= 0");
    require(packet_length_bytes >= 0, "packet_length must be >= 0");
    phy.validate();
    bool any_active = false;
    for (const auto& ac : ac_configs) {
        ac.validate();
        any_active = any_active || ac.active;
    }
    require(any_active, "at least one access category must be active");
}

void Scenario::set_txop(int txop_packets) {
    for (auto& ac : ac_configs) {
        ac.txop_packets = txop_packets;
    }
}

std::vector<int> backoff_window_schedule(const AcConfig& cfg) {
    cfg.validate();
    std::vector<int> windows;
    windows.reserve(static_cast<std::size_t>(cfg.retry_limit) + 1);
    long long w = cfg.cw_min + 1;
    const long long cap = static_cast<long long>(cfg.cw_max) + 1;
    for (int j = 0; j <= cfg.retry_limit; ++j) {
        windows.push_back(static_cast<int>(std::min(w, cap)));
        w = std::min(w * 2, cap);
    }
    return windows;
}

double initial_state_prob(double p, std::span<const int> schedule) {
    require(!schedule.empty(), "backoff schedule must be nonempty");
    require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    if (p >= 1.0) {
        throw DegenerateInputError("initial_state_prob: p = 1 makes the chain normalisation undefined");
    }
    double denom = 0.0;
    double p_j = 1.0;
    for (int w : schedule) {
        require(w >= 1, "window sizes must be >= 1");
        // sum_{k=1}^{W-1} (W-k)/W = (W-1)/2
        const double countdown = 0.5 * (w - 1);
        denom += (1.0 + countdown / (1.0 - p)) * p_j;
        p_j *= p;
    }
    return 1.0 / denom;
}

double ac_transmit_prob(double b000, double p, int retry_limit) {
    require(b000 >= 0.0 && b000 <= 1.0, "b000 must lie in [0, 1]");
    require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    require(retry_limit >= 0, "retry_limit must be >= 0");
    if (p >= 1.0) {
        throw DegenerateInputError("ac_transmit_prob: p = 1 is degenerate");
    }
    return b000 * (1.0 - ipow(p, retry_limit + 1)) / (1.0 - p);
}

double station_transmit_prob(std::span<const double> taus) {
    double idle = 1.0;
    for (double t : taus) {
        require(t >= 0.0 && t <= 1.0, "tau must lie in [0, 1]");
        idle *= 1.0 - t;
    }
    return 1.0 - idle;
}

double ac_collision_prob(double station_tau, int n_stations, std::span<const double> higher_priority_taus) {
    require(station_tau >= 0.0 && station_tau <= 1.0, "station tau must lie in [0, 1]");
    require(n_stations >= 1, "n_stations must be >= 1");
    double clear = ipow(1.0 - station_tau, n_stations - 1);
    for (double t : higher_priority_taus) {
        clear *= 1.0 - t;
    }
    return 1.0 - clear;
}

double success_prob(double tau_i, double p_coll_i, int n_stations) {
    const double raw = n_stations * tau_i * (1.0 - p_coll_i);
    return std::clamp(raw, 0.0, 1.0);
}

double aifs_duration_us(const PhyMacParams& phy, const AcConfig& ac) {
    return phy.sifs_us + ac.aifsn * phy.slot_time_us;
}

FrameTimings frame_timings(const PhyMacParams& phy, const AcConfig& ac, int packet_length_bytes) {
    FrameTimings t;
    t.t_data_us = ofdm_duration_us(phy, 8.0 * (packet_length_bytes + phy.mac_header_bytes), phy.phy_rate_bps);
    t.t_ack_us = ofdm_duration_us(phy, 8.0 * phy.ack_size_bytes, phy.control_rate_bps);
    t.aifs_us = aifs_duration_us(phy, ac);
    const double exchange = t.t_data_us + phy.sifs_us + t.t_ack_us + 2.0 * phy.prop_delay_us;
    const int k = ac.txop_packets;
    t.t_success_us = t.aifs_us + (k + 1) * exchange + k * phy.sifs_us;
    // ACK timeout = SIFS + ACK duration
    t.t_collision_us = t.aifs_us + t.t_data_us + phy.sifs_us + t.t_ack_us;
    return t;
}

double saturation_throughput(const SystemSolution& sol, std::size_t ac_index, const Scenario& scenario) {
    require(ac_index < kNumAcs, "access category index out of range");
    const AcSolution& ac = sol.per_ac[ac_index];
    if (ac.p_succ <= 0.0) {
        return 0.0;
    }
    const AcConfig& cfg = scenario.ac_configs[ac_index];
    const double bits = ac.p_succ * (cfg.txop_packets + 1) * 8.0 * scenario.packet_length_bytes;
    const double slot_us = (1.0 - sol.p_busy) * scenario.phy.slot_time_us +
                           sol.p_succ_total * sol.t_success_us[ac_index] + sol.p_coll_total * sol.t_collision_us;
    return bits / slot_us * 1e6;
}

double access_delay(double payload_per_access_bits, double throughput_bps) {
    require(payload_per_access_bits >= 0.0, "payload must be >= 0");
    require(throughput_bps >= 0.0, "throughput must be >= 0");
    if (throughput_bps == 0.0) {
        throw StarvedClassError("access_delay: zero throughput, delay is unbounded");
    }
    return payload_per_access_bits / throughput_bps;
}

double retry_drop_prob(double p, int retry_limit) {
    require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    require(retry_limit >= 0, "retry_limit must be >= 0");
    return ipow(p, retry_limit + 1);
}

double offered_load(double lambda, double delay_s) {
    require(lambda >= 0.0, "lambda must be >= 0");
    require(delay_s > 0.0, "delay must be > 0");
    return lambda * delay_s;
}

double queue_drop_prob(double rho, int capacity) {
    require(rho >= 0.0, "rho must be >= 0");
    require(capacity >= 1, "queue capacity must be >= 1");
    if (rho == 0.0) {
        return 0.0;
    }
    const int k = capacity;
    if (rho == 1.0) {
        return 1.0 / (k + 1);
    }
    const double log_rho = std::log(rho);
    if (rho < 1.0) {
        // rho^K (rho - 1) / (rho^{K+1} - 1)
        return std::exp(k * log_rho) * (rho - 1.0) / std::expm1((k + 1) * log_rho);
    }
    // (1 - 1/rho) / (1 - rho^{-(K+1)})
    return -std::expm1(-log_rho) / -std::expm1(-(k + 1) * log_rho);
}

double total_drop_prob(double p_retry_drop, double p_queue_drop) {
    require(p_retry_drop >= 0.0 && p_retry_drop <= 1.0, "retry drop must lie in [0, 1]");
    require(p_queue_drop >= 0.0 && p_queue_drop <= 1.0, "queue drop must lie in [0, 1]");
    return 1.0 - (1.0 - p_retry_drop) * (1.0 - p_queue_drop);
}

SystemSolution solve_fixed_point(const Scenario& scenario, const SolverOptions& options) {
    scenario.validate();
    require(options.damping > 0.0 && options.damping <= 1.0, "damping must lie in (0, 1]");
    require(options.max_iterations >= 1, "iteration budget must be >= 1");

    const auto& acs = scenario.ac_configs;
    PerAc<std::vector<int>> schedules;
    for (std::size_t i = 0; i < kNumAcs; ++i) {
        schedules[i] = backoff_window_schedule(acs[i]);
    }

    PerAc<double> p{};
    PerAc<double> taus{};
    PerAc<double> p_next{};
    PerAc<double> b000{};
    double residual = std::numeric_limits<double>::infinity();
    int iteration = 0;
    bool converged = false;

    for (iteration = 1; iteration <= options.max_iterations; ++iteration) {
        for (std::size_t i = 0; i < kNumAcs; ++i) {
            if (!acs[i].active) {
                b000[i] = 0.0;
                taus[i] = 0.0;
                continue;
            }
            b000[i] = initial_state_prob(p[i], schedules[i]);
            taus[i] = ac_transmit_prob(b000[i], p[i], acs[i].retry_limit);
        }
        const double station_tau = station_transmit_prob(taus);
        residual = 0.0;
        for (std::size_t i = 0; i < kNumAcs; ++i) {
            p_next[i] = ac_collision_prob(station_tau, scenario.n_stations, std::span<const double>(taus.data(), i));
            if (acs[i].active) {
                residual = std::max(residual, std::abs(p_next[i] - p[i]));
            }
        }
        if (residual <= options.tolerance) {
            converged = true;
            break;
        }
        for (std::size_t i = 0; i < kNumAcs; ++i) {
            p[i] = (1.0 - options.damping) * p[i] + options.damping * p_next[i];
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "fixed point did not converge after " << options.max_iterations << " iterations (residual "
            << residual << ")";
        throw SolverError(msg.str(), residual, options.max_iterations);
    }

    SystemSolution sol;
    sol.residual = residual;
    sol.iterations = iteration;
    sol.station_tau = station_transmit_prob(taus);
    sol.p_busy = 1.0 - ipow(1.0 - sol.station_tau, scenario.n_stations);

    double p_succ_total = 0.0;
    for (std::size_t i = 0; i < kNumAcs; ++i) {
        AcSolution& ac = sol.per_ac[i];
        ac.tau = taus[i];
        ac.b000 = b000[i];
        ac.p_busy_around = p[i];
        ac.p_coll = p[i];
        ac.p_drop_retry = acs[i].active ? retry_drop_prob(p[i], acs[i].retry_limit) : 0.0;
        const double raw_succ = scenario.n_stations * taus[i] * (1.0 - p[i]);
        ac.p_succ = success_prob(taus[i], p[i], scenario.n_stations);
        if (raw_succ > 1.0) {
            std::ostringstream msg;
            msg << "AC" << i + 1 << ": success probability " << raw_succ << " clamped to 1";
            sol.diagnostics.push_back(msg.str());
        }
        ac.payload_per_access_bits = (acs[i].txop_packets + 1) * 8.0 * scenario.packet_length_bytes;
        p_succ_total += ac.p_succ;
        sol.t_success_us[i] = frame_timings(scenario.phy, acs[i], scenario.packet_length_bytes).t_success_us;
    }
    sol.p_succ_total = std::min(p_succ_total, 1.0);
    sol.p_coll_total = std::max(0.0, sol.p_busy - sol.p_succ_total);

    const auto reference = std::find_if(acs.begin(), acs.end(), [](const AcConfig& ac) { return ac.active; });
    sol.t_collision_us = frame_timings(scenario.phy, *reference, scenario.packet_length_bytes).t_collision_us;

    for (std::size_t i = 0; i < kNumAcs; ++i) {
        AcSolution& ac = sol.per_ac[i];
        ac.throughput_bps = saturation_throughput(sol, i, scenario);
        ac.access_delay_s = ac.throughput_bps > 0.0 ? access_delay(ac.payload_per_access_bits, ac.throughput_bps)
                                                    : std::numeric_limits<double>::infinity();
    }
    return sol;
}

} // namespace edcamap
