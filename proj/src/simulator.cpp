#include "edcamap/simulator.hpp"

#include "edcamap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace edcamap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Packet {
    double arrival_us = 0.0;
    double hol_us = 0.0;
    int layer = -1;
    std::int64_t gop = -1;
    bool measured = false;
};

struct AcQueue {
    std::deque<Packet> packets;
    bool contending = false;
    int retries = 0;
    int aifs_left = 0;
    int backoff = 0;
    double rate_per_us = 0.0;
    double next_arrival_us = kInf;
    int round_robin = 0;

    int slots_to_transmit() const { return aifs_left + backoff; }

    void count_down(int slots) {
        const int from_aifs = std::min(slots, aifs_left);
        aifs_left -= from_aifs;
        backoff -= slots - from_aifs;
    }
};

struct LayerTally {
    int arrived = 0;
    int on_time = 0;
};

class EdcaSimulation {
public:
    explicit EdcaSimulation(const SimConfig& cfg)
        : cfg_(cfg), scenario_(cfg.scenario), rng_(cfg.seed),
          stations_(static_cast<std::size_t>(scenario_.n_stations)) {
        const auto& phy = scenario_.phy;
        slot_us_ = phy.slot_time_us;
        end_us_ = cfg.sim_duration_s * 1e6;
        warmup_us_ = cfg.warmup_fraction * end_us_;
        gop_us_ = cfg.gop_duration_s * 1e6;
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            const AcConfig& acfg = scenario_.ac_configs[ac];
            schedules_[ac] = backoff_window_schedule(acfg);
            const FrameTimings t = frame_timings(phy, acfg, scenario_.packet_length_bytes);
            exchange_us_[ac] = t.t_data_us + phy.sifs_us + t.t_ack_us + 2.0 * phy.prop_delay_us;
            // Data frame plus ACK timeout; identical for every category.
            collision_us_ = t.t_data_us + phy.sifs_us + t.t_ack_us;
        }
        int start = 0;
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            layer_start_[ac] = start;
            start += cfg.mapping[ac];
        }
        stats_.useful_layer_histogram.assign(static_cast<std::size_t>(scenario_.layer_count) + 1, 0);
        stats_.layer_delivery_ratio.assign(static_cast<std::size_t>(scenario_.layer_count), 0.0);

        const auto gops = static_cast<std::size_t>(std::ceil(end_us_ / gop_us_)) + 1;
        for (auto& station : stations_) {
            station.gops.assign(gops, std::vector<LayerTally>(static_cast<std::size_t>(scenario_.layer_count)));
            station.gop_has_traffic.assign(gops, false);
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                AcQueue& q = station.queues[ac];
                if (!scenario_.ac_configs[ac].active) {
                    continue;
                }
                if (cfg.saturated) {
                    push_saturated(q, ac, 0.0);
                    start_contention(q, ac);
                    continue;
                }
                q.rate_per_us = cfg.mapping[ac] * scenario_.per_layer_rate * 1e-6;
                if (q.rate_per_us > 0.0) {
                    q.next_arrival_us = draw_interarrival(q.rate_per_us);
                    if (q.next_arrival_us >= end_us_) {
                        q.next_arrival_us = kInf;
                    }
                }
            }
        }
    }

    SimStats run() {
        double now = 0.0;
        while (true) {
            int min_slots = std::numeric_limits<int>::max();
            for (const auto& station : stations_) {
                for (const auto& q : station.queues) {
                    if (q.contending) {
                        min_slots = std::min(min_slots, q.slots_to_transmit());
                    }
                }
            }
            const auto [arrival_station, arrival_ac, arrival_us] = next_arrival();
            const bool have_tx = min_slots != std::numeric_limits<int>::max();
            if (!have_tx && arrival_us == kInf) {
                break;
            }
            const double tx_us = have_tx ? now + min_slots * slot_us_ : kInf;
            if (arrival_us < tx_us) {
                const int slots = std::max(0, static_cast<int>(std::ceil((arrival_us - now) / slot_us_ - 1e-12)));
                advance(slots);
                now += slots * slot_us_;
                handle_arrival(arrival_station, arrival_ac, arrival_us);
                continue;
            }
            advance(min_slots);
            now = tx_us;
            now = transmit(now);
        }
        finish();
        return stats_;
    }

private:
    struct Station {
        PerAc<AcQueue> queues;
        std::vector<std::vector<LayerTally>> gops;
        std::vector<bool> gop_has_traffic;
    };

    struct Arrival {
        std::size_t station;
        std::size_t ac;
        double time_us;
    };

    double draw_interarrival(double rate_per_us) {
        std::exponential_distribution<double> dist(rate_per_us);
        return dist(rng_);
    }

    int draw_backoff(int window) {
        std::uniform_int_distribution<int> dist(0, window - 1);
        return dist(rng_);
    }

    void trace(double t, std::size_t station, std::size_t ac, const char* event) {
        if (cfg_.trace != nullptr) {
            *cfg_.trace << t << ' ' << station << ' ' << ac + 1 << ' ' << event << '\n';
        }
    }

    bool in_window(double t) const { return t >= warmup_us_ && t < end_us_; }

    Arrival next_arrival() const {
        Arrival best{0, 0, kInf};
        for (std::size_t s = 0; s < stations_.size(); ++s) {
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                const double t = stations_[s].queues[ac].next_arrival_us;
                if (t < best.time_us) {
                    best = {s, ac, t};
                }
            }
        }
        return best;
    }

    void advance(int slots) {
        if (slots == 0) {
            return;
        }
        for (auto& station : stations_) {
            for (auto& q : station.queues) {
                if (q.contending) {
                    q.count_down(slots);
                }
            }
        }
    }

    void start_contention(AcQueue& q, std::size_t ac) {
        q.contending = true;
        q.aifs_left = scenario_.ac_configs[ac].aifsn;
        q.backoff = draw_backoff(schedules_[ac][static_cast<std::size_t>(q.retries)]);
    }

    void push_saturated(AcQueue& q, std::size_t ac, double now) {
        Packet p;
        p.arrival_us = now;
        p.hol_us = now;
        p.measured = in_window(now);
        if (p.measured) {
            stats_.per_ac[ac].offered++;
        }
        q.packets.push_back(p);
    }

    void handle_arrival(std::size_t s, std::size_t ac, double t) {
        Station& station = stations_[s];
        AcQueue& q = station.queues[ac];
        q.next_arrival_us = t + draw_interarrival(q.rate_per_us);
        if (q.next_arrival_us >= end_us_) {
            q.next_arrival_us = kInf;
        }

        Packet p;
        p.arrival_us = t;
        p.hol_us = t;
        p.measured = in_window(t);
        p.gop = static_cast<std::int64_t>(std::floor(t / gop_us_));
        p.layer = layer_start_[ac] + q.round_robin;
        q.round_robin = (q.round_robin + 1) % cfg_.mapping[ac];

        AcStats& st = stats_.per_ac[ac];
        const auto g = static_cast<std::size_t>(p.gop);
        station.gop_has_traffic[g] = true;
        station.gops[g][static_cast<std::size_t>(p.layer)].arrived++;
        if (p.measured) {
            st.offered++;
        }
        if (static_cast<int>(q.packets.size()) >= scenario_.queue_capacity) {
            if (p.measured) {
                st.queue_drops++;
            }
            trace(t, s, ac, "queue_drop");
            return;
        }
        trace(t, s, ac, "arrival");
        q.packets.push_back(p);
        if (q.packets.size() == 1) {
            start_contention(q, ac);
        }
    }

    // Medium is busy from `now` on; returns the time the medium turns idle
    // again (SIFS after the exchange, start of every category's AIFS).
    double transmit(double now) {
        std::vector<std::pair<std::size_t, std::size_t>> winners;
        for (std::size_t s = 0; s < stations_.size(); ++s) {
            int on_air = 0;
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                AcQueue& q = stations_[s].queues[ac];
                if (!q.contending || q.slots_to_transmit() != 0) {
                    continue;
                }
                if (on_air == 0) {
                    winners.emplace_back(s, ac);
                    on_air = 1;
                    continue;
                }
                // A higher-priority category of this station already won the slot.
                if (in_window(now)) {
                    stats_.per_ac[ac].internal_collisions++;
                }
                trace(now, s, ac, "internal_collision");
                fail(s, ac, now);
            }
            stats_.max_station_transmitters = std::max(stats_.max_station_transmitters, on_air);
        }

        const double sifs = scenario_.phy.sifs_us;
        double busy_until = now;
        for (const auto& [s, ac] : winners) {
            if (in_window(now)) {
                stats_.per_ac[ac].transmissions++;
            }
        }
        if (winners.size() > 1) {
            for (const auto& [s, ac] : winners) {
                if (in_window(now)) {
                    stats_.per_ac[ac].collided_attempts++;
                }
                trace(now, s, ac, "collision");
                fail(s, ac, now);
            }
            busy_until = now + collision_us_;
        } else {
            const auto [s, ac] = winners.front();
            busy_until = deliver_burst(s, ac, now);
        }
        busy_until += sifs;
        for (std::size_t s = 0; s < stations_.size(); ++s) {
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                AcQueue& q = stations_[s].queues[ac];
                if (cfg_.saturated && scenario_.ac_configs[ac].active && !q.contending && busy_until < end_us_) {
                    push_saturated(q, ac, busy_until);
                    start_contention(q, ac);
                }
                if (q.contending) {
                    q.aifs_left = scenario_.ac_configs[ac].aifsn;
                }
            }
        }
        return busy_until;
    }

    double deliver_burst(std::size_t s, std::size_t ac, double now) {
        AcQueue& q = stations_[s].queues[ac];
        const AcConfig& acfg = scenario_.ac_configs[ac];
        AcStats& st = stats_.per_ac[ac];
        const double sifs = scenario_.phy.sifs_us;
        const double bits = 8.0 * scenario_.packet_length_bytes;
        double t = now;
        for (int k = 0; k <= acfg.txop_packets && !q.packets.empty(); ++k) {
            if (k > 0) {
                t += sifs;
            }
            t += exchange_us_[ac];
            const Packet p = q.packets.front();
            q.packets.pop_front();
            trace(t, s, ac, "success");
            if (t >= warmup_us_ && t <= end_us_) {
                delivered_bits_[ac] += bits;
            }
            if (p.measured) {
                st.delivered++;
                delay_sum_us_[ac] += t - p.hol_us;
            }
            record_delivery(s, p, t);
            if (!q.packets.empty()) {
                q.packets.front().hol_us = std::max(q.packets.front().hol_us, t);
            }
        }
        q.retries = 0;
        q.contending = false;
        if (!q.packets.empty()) {
            start_contention(q, ac);
        }
        return t;
    }

    void fail(std::size_t s, std::size_t ac, double now) {
        AcQueue& q = stations_[s].queues[ac];
        q.retries++;
        if (q.retries > scenario_.ac_configs[ac].retry_limit) {
            const Packet p = q.packets.front();
            q.packets.pop_front();
            if (p.measured) {
                stats_.per_ac[ac].retry_drops++;
            }
            trace(now, s, ac, "retry_drop");
            q.retries = 0;
            if (!q.packets.empty()) {
                q.packets.front().hol_us = std::max(q.packets.front().hol_us, now);
            }
        }
        q.contending = false;
        if (!q.packets.empty()) {
            start_contention(q, ac);
        }
    }

    void record_delivery(std::size_t s, const Packet& p, double t) {
        if (p.gop < 0) {
            return;
        }
        const double deadline = static_cast<double>(p.gop + 2) * gop_us_;
        if (t <= deadline) {
            stations_[s].gops[static_cast<std::size_t>(p.gop)][static_cast<std::size_t>(p.layer)].on_time++;
        }
    }

    void finish() {
        const double window_us = end_us_ - warmup_us_;
        stats_.measured_duration_s = window_us * 1e-6;
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            AcStats& st = stats_.per_ac[ac];
            st.throughput_bps = delivered_bits_[ac] / window_us * 1e6;
            if (st.delivered > 0) {
                st.mean_access_delay_s = delay_sum_us_[ac] / static_cast<double>(st.delivered) * 1e-6;
            } else if (st.offered > 0 || (cfg_.saturated && scenario_.ac_configs[ac].active)) {
                st.mean_access_delay_s = kInf; // nothing got through
            }
        }
        if (cfg_.saturated) {
            stats_.no_traffic = false;
            return;
        }

        const auto layers = static_cast<std::size_t>(scenario_.layer_count);
        std::vector<std::uint64_t> delivered_layers(layers, 0);
        std::uint64_t measured = 0;
        std::vector<bool> delivered(layers);
        for (const auto& station : stations_) {
            for (std::size_t g = 0; g < station.gops.size(); ++g) {
                const double start = static_cast<double>(g) * gop_us_;
                if (start < warmup_us_ || start + gop_us_ > end_us_ || !station.gop_has_traffic[g]) {
                    continue;
                }
                for (std::size_t l = 0; l < layers; ++l) {
                    const LayerTally& tally = station.gops[g][l];
                    delivered[l] = tally.on_time == tally.arrived;
                    delivered_layers[l] += delivered[l] ? 1 : 0;
                }
                stats_.useful_layer_histogram[useful_prefix(delivered)]++;
                measured++;
            }
        }
        stats_.no_traffic = measured == 0;
        if (measured > 0) {
            for (std::size_t l = 0; l < layers; ++l) {
                stats_.layer_delivery_ratio[l] = static_cast<double>(delivered_layers[l]) / static_cast<double>(measured);
            }
            stats_.avg_useful_layers = measure_useful_layers(stats_);
        }
    }

    const SimConfig& cfg_;
    const Scenario& scenario_;
    std::mt19937_64 rng_;
    std::vector<Station> stations_;
    PerAc<std::vector<int>> schedules_;
    PerAc<double> exchange_us_{};
    PerAc<int> layer_start_{};
    PerAc<double> delivered_bits_{};
    PerAc<double> delay_sum_us_{};
    double collision_us_ = 0.0;
    double slot_us_ = 0.0;
    double end_us_ = 0.0;
    double warmup_us_ = 0.0;
    double gop_us_ = 0.0;
    SimStats stats_;
};

} // namespace

void SimConfig::validate() const {
    scenario.validate();
    if (!(sim_duration_s > 0.0)) {
        throw std::invalid_argument("sim_duration must be > 0");
    }
    if (!(gop_duration_s > 0.0)) {
        throw std::invalid_argument("gop_duration must be > 0");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
    }
    if (!saturated && mapping.layer_count() != scenario.layer_count) {
        throw std::invalid_argument("mapping does not cover the scenario's layer count");
    }
}

std::uint64_t SimStats::gop_count() const {
    return std::accumulate(useful_layer_histogram.begin(), useful_layer_histogram.end(), std::uint64_t{0});
}

SimStats run_simulation(const SimConfig& cfg) {
    cfg.validate();
    return EdcaSimulation(cfg).run();
}

std::size_t useful_prefix(const std::vector<bool>& layer_delivered) {
    const auto first_loss = std::find(layer_delivered.begin(), layer_delivered.end(), false);
    return static_cast<std::size_t>(first_loss - layer_delivered.begin());
}

double measure_useful_layers(const SimStats& stats) {
    const std::uint64_t gops = stats.gop_count();
    if (gops == 0) {
        throw InsufficientDataError("no completed GOP to measure");
    }
    double sum = 0.0;
    for (std::size_t u = 0; u < stats.useful_layer_histogram.size(); ++u) {
        sum += static_cast<double>(u) * static_cast<double>(stats.useful_layer_histogram[u]);
    }
    return sum / static_cast<double>(gops);
}

} // namespace edcamap
