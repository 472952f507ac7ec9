#include "edcamap/sweep.hpp"

#include <json.hpp>

#include <istream>
#include <stdexcept>

namespace edcamap {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& field) {
    if (j.contains(key)) {
        j.at(key).get_to(field);
    }
}

PhyMacParams phy_from_json(const json& j, PhyMacParams phy) {
    read_field(j, "sifs_us", phy.sifs_us);
    read_field(j, "slot_time_us", phy.slot_time_us);
    read_field(j, "ack_size_bytes", phy.ack_size_bytes);
    read_field(j, "phy_rate_bps", phy.phy_rate_bps);
    read_field(j, "control_rate_bps", phy.control_rate_bps);
    read_field(j, "t_phy_us", phy.t_phy_us);
    read_field(j, "t_sym_us", phy.t_sym_us);
    read_field(j, "t_preamble_us", phy.t_preamble_us);
    read_field(j, "prop_delay_us", phy.prop_delay_us);
    read_field(j, "mac_header_bytes", phy.mac_header_bytes);
    return phy;
}

AcConfig ac_from_json(const json& j, AcConfig ac) {
    read_field(j, "cw_min", ac.cw_min);
    read_field(j, "cw_max", ac.cw_max);
    read_field(j, "aifsn", ac.aifsn);
    read_field(j, "retry_limit", ac.retry_limit);
    read_field(j, "txop_packets", ac.txop_packets);
    read_field(j, "active", ac.active);
    return ac;
}

Scenario scenario_from_json(const json& j, Scenario s) {
    if (!j.is_object()) {
        throw std::invalid_argument("scenario config must be a JSON object");
    }
    read_field(j, "n_stations", s.n_stations);
    read_field(j, "packet_length_bytes", s.packet_length_bytes);
    read_field(j, "queue_capacity", s.queue_capacity);
    read_field(j, "layer_count", s.layer_count);
    read_field(j, "per_layer_rate", s.per_layer_rate);
    if (j.contains("phy")) {
        s.phy = phy_from_json(j.at("phy"), s.phy);
    }
    if (j.contains("ac_configs")) {
        const json& acs = j.at("ac_configs");
        if (!acs.is_array() || acs.size() != kNumAcs) {
            throw std::invalid_argument("ac_configs must list exactly 4 access categories");
        }
        for (std::size_t i = 0; i < kNumAcs; ++i) {
            s.ac_configs[i] = ac_from_json(acs[i], s.ac_configs[i]);
        }
    }
    if (j.contains("txop_packets")) {
        s.set_txop(j.at("txop_packets").get<int>());
    }
    return s;
}

json scenario_to_json(const Scenario& s) {
    json acs = json::array();
    for (const auto& ac : s.ac_configs) {
        acs.push_back({{"cw_min", ac.cw_min},
                       {"cw_max", ac.cw_max},
                       {"aifsn", ac.aifsn},
                       {"retry_limit", ac.retry_limit},
                       {"txop_packets", ac.txop_packets},
                       {"active", ac.active}});
    }
    const auto& p = s.phy;
    return {{"n_stations", s.n_stations},
            {"packet_length_bytes", s.packet_length_bytes},
            {"queue_capacity", s.queue_capacity},
            {"layer_count", s.layer_count},
            {"per_layer_rate", s.per_layer_rate},
            {"ac_configs", acs},
            {"phy",
             {{"sifs_us", p.sifs_us},
              {"slot_time_us", p.slot_time_us},
              {"ack_size_bytes", p.ack_size_bytes},
              {"phy_rate_bps", p.phy_rate_bps},
              {"control_rate_bps", p.control_rate_bps},
              {"t_phy_us", p.t_phy_us},
              {"t_sym_us", p.t_sym_us},
              {"t_preamble_us", p.t_preamble_us},
              {"prop_delay_us", p.prop_delay_us},
              {"mac_header_bytes", p.mac_header_bytes}}}};
}

json parse_json(std::istream& in) {
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON config: ") + e.what());
    }
}

} // namespace

Scenario load_scenario(std::istream& in, Scenario base) {
    try {
        Scenario s = scenario_from_json(parse_json(in), base);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad scenario config: ") + e.what());
    }
}

std::string dump_scenario(const Scenario& s) {
    return scenario_to_json(s).dump(2);
}

SweepSpec load_sweep_spec(std::istream& in) {
    const json j = parse_json(in);
    try {
        SweepSpec spec;
        if (j.contains("preset")) {
            spec = preset(j.at("preset").get<std::string>());
        }
        if (j.contains("base")) {
            spec.base = scenario_from_json(j.at("base"), spec.base);
        }
        read_field(j, "n_grid", spec.n_grid);
        read_field(j, "l_grid", spec.l_grid);
        read_field(j, "txop_grid", spec.txop_grid);
        read_field(j, "delta_grid", spec.delta_grid);
        read_field(j, "with_simulation", spec.with_simulation);
        read_field(j, "seeds", spec.seeds);
        read_field(j, "sim_duration_s", spec.sim_duration_s);
        read_field(j, "jobs", spec.jobs);
        if (j.contains("strategies")) {
            spec.strategies.clear();
            for (const auto& name : j.at("strategies")) {
                spec.strategies.push_back(parse_strategy(name.get<std::string>()));
            }
        }
        if (spec.n_grid.empty()) {
            spec.n_grid = {spec.base.n_stations};
        }
        if (spec.l_grid.empty()) {
            spec.l_grid = {spec.base.layer_count};
        }
        if (spec.txop_grid.empty()) {
            spec.txop_grid = {spec.base.ac_configs[0].txop_packets};
        }
        if (j.contains("rate_grid")) {
            j.at("rate_grid").get_to(spec.rate_grid);
        } else if (spec.rate_grid.empty() || j.contains("base") || j.contains("n_grid") || j.contains("txop_grid")) {
            Scenario reference = spec.base;
            reference.n_stations = spec.n_grid.front();
            reference.set_txop(spec.txop_grid.front());
            spec.rate_grid = default_rate_grid(reference);
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad sweep spec: ") + e.what());
    }
}

} // namespace edcamap
