// Command-line front end: model, optimize, simulate, sweep.

#include "edcamap/analytics.hpp"
#include "edcamap/errors.hpp"
#include "edcamap/mapping.hpp"
#include "edcamap/simulator.hpp"
#include "edcamap/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace edcamap;

namespace {

struct ScenarioFlags {
    std::string config;
    std::optional<int> n_stations;
    std::optional<int> layers;
    std::optional<int> txop;
    std::optional<int> queue_capacity;
    std::optional<int> packet_length;
    std::optional<double> rate;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON scenario file")->check(CLI::ExistingFile);
        cmd->add_option("-n,--stations", n_stations, "number of stations N");
        cmd->add_option("-l,--layers", layers, "video layers L");
        cmd->add_option("--txop", txop, "extra packets per channel access, all categories");
        cmd->add_option("--queue", queue_capacity, "queue capacity K");
        cmd->add_option("--length", packet_length, "payload bytes per packet");
        cmd->add_option("-r,--rate", rate, "per-layer arrival rate (packets/s)");
    }

    Scenario build() const {
        Scenario s;
        if (!config.empty()) {
            std::ifstream in(config);
            s = load_scenario(in);
        }
        if (n_stations) s.n_stations = *n_stations;
        if (layers) s.layer_count = *layers;
        if (txop) s.set_txop(*txop);
        if (queue_capacity) s.queue_capacity = *queue_capacity;
        if (packet_length) s.packet_length_bytes = *packet_length;
        if (rate) s.per_layer_rate = *rate;
        s.validate();
        return s;
    }
};

void print_model(const Scenario& s, const SystemSolution& sol) {
    std::printf("N=%d L=%d K=%d len=%d rate=%g\n", s.n_stations, s.layer_count, s.queue_capacity,
                s.packet_length_bytes, s.per_layer_rate);
    std::printf("converged in %d iterations, residual %.3g\n", sol.iterations, sol.residual);
    std::printf("%-4s %10s %10s %10s %12s %12s %10s\n", "ac", "tau", "p_coll", "p_succ", "S (b/s)", "E[D] (s)",
                "P_retry");
    for (std::size_t i = 0; i < kNumAcs; ++i) {
        const AcSolution& a = sol.per_ac[i];
        std::printf("AC%-2zu %10.6f %10.6f %10.6f %12.1f %12.6g %10.6f\n", i + 1, a.tau, a.p_coll, a.p_succ,
                    a.throughput_bps, a.access_delay_s, a.p_drop_retry);
    }
    for (const auto& note : sol.diagnostics) {
        std::printf("note: %s\n", note.c_str());
    }
}

int run_model(const ScenarioFlags& flags, bool dump) {
    const Scenario s = flags.build();
    if (dump) {
        std::cout << dump_scenario(s) << '\n';
        return 0;
    }
    print_model(s, solve_fixed_point(s));
    return 0;
}

int run_optimize(const ScenarioFlags& flags, const std::vector<double>& deltas) {
    const Scenario s = flags.build();
    const SystemSolution sol = solve_fixed_point(s);
    auto report = [&](const char* name, const MappingVector& m) {
        const MappingEvaluation e = evaluate_mapping(m, s, sol);
        std::printf("%-16s %-12s E[UL]=%.6f  drops=%.4f/%.4f/%.4f/%.4f\n", name, m.to_string().c_str(),
                    e.expected_useful_layers, e.drop[0], e.drop[1], e.drop[2], e.drop[3]);
    };
    report("exhaustive", best_exhaustive(s, sol).mapping);
    report("canonical", best_canonical(s, sol).mapping);
    try {
        report("non-canonical", best_non_canonical(s, sol).mapping);
    } catch (const EmptyDomainError&) {
        std::printf("%-16s (none for L=%d)\n", "non-canonical", s.layer_count);
    }
    report("ocom", ocom_search(s.layer_count, static_cast<int>(kNumAcs), s, sol).mapping);
    for (double delta : deltas) {
        const std::string name = "suboptimal@" + std::to_string(delta).substr(0, 4);
        report(name.c_str(), suboptimal_map(s, sol, delta));
    }
    return 0;
}

int run_simulate(const ScenarioFlags& flags, const std::string& mapping, std::uint64_t seed, double duration,
                 bool saturated, const std::string& trace_path) {
    SimConfig cfg;
    cfg.scenario = flags.build();
    cfg.mapping = MappingVector::parse(mapping);
    cfg.seed = seed;
    cfg.sim_duration_s = duration;
    cfg.saturated = saturated;
    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) {
            throw std::runtime_error("cannot open trace file '" + trace_path + "'");
        }
        cfg.trace = &trace;
    }
    const SimStats st = run_simulation(cfg);
    std::printf("measured %.3f s, seed %llu\n", st.measured_duration_s, static_cast<unsigned long long>(seed));
    std::printf("%-4s %10s %10s %8s %8s %12s %12s %12s\n", "ac", "offered", "delivered", "r_drop", "q_drop", "tx",
                "S (b/s)", "delay (s)");
    for (std::size_t i = 0; i < kNumAcs; ++i) {
        const AcStats& a = st.per_ac[i];
        std::printf("AC%-2zu %10llu %10llu %8llu %8llu %12llu %12.1f %12.6g\n", i + 1,
                    static_cast<unsigned long long>(a.offered), static_cast<unsigned long long>(a.delivered),
                    static_cast<unsigned long long>(a.retry_drops), static_cast<unsigned long long>(a.queue_drops),
                    static_cast<unsigned long long>(a.transmissions), a.throughput_bps, a.mean_access_delay_s);
    }
    if (!saturated) {
        if (st.no_traffic) {
            std::printf("no traffic offered\n");
        } else {
            std::printf("avg useful layers %.4f over %llu GOPs\n", st.avg_useful_layers,
                        static_cast<unsigned long long>(st.gop_count()));
        }
    }
    return 0;
}

int run_sweep_cmd(const std::string& preset_name, const std::string& spec_path, const std::string& out,
                  bool with_sim, std::optional<int> jobs, std::optional<std::uint64_t> seed) {
    SweepSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        spec = load_sweep_spec(in);
    } else {
        spec = preset(preset_name);
    }
    if (with_sim) spec.with_simulation = true;
    if (jobs) spec.jobs = *jobs;
    if (seed) spec.seeds = {*seed};
    const auto rows = run_sweep(spec);
    if (out == "-") {
        write_csv(rows, std::cout);
    } else {
        emit_csv(rows, out);
        std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), out.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EDCA video layer mapping: model, optimizer, simulator"};
    app.require_subcommand(1);

    ScenarioFlags model_flags;
    bool dump = false;
    auto* model = app.add_subcommand("model", "solve the analytic model for one scenario");
    model_flags.attach(model);
    model->add_flag("--dump", dump, "print the effective scenario as JSON and exit");

    ScenarioFlags opt_flags;
    std::vector<double> deltas;
    auto* optimize = app.add_subcommand("optimize", "best mapping per strategy");
    opt_flags.attach(optimize);
    optimize->add_option("--delta", deltas, "thresholds for the sub-optimal heuristic")->check(CLI::Range(0.0, 1.0));

    ScenarioFlags sim_flags;
    std::string mapping;
    std::uint64_t sim_seed = 1;
    double duration = 60.0;
    bool saturated = false;
    std::string trace_path;
    auto* simulate = app.add_subcommand("simulate", "run the EDCA simulator");
    sim_flags.attach(simulate);
    simulate->add_option("-m,--mapping", mapping, "layers per category, e.g. 3-2-2-1")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--duration", duration, "simulated seconds");
    simulate->add_flag("--saturated", saturated, "every category always backlogged");
    simulate->add_option("--trace", trace_path, "write a MAC event trace");

    std::string preset_name;
    std::string spec_path;
    std::string out;
    bool with_sim = false;
    std::optional<int> jobs;
    std::optional<std::uint64_t> sweep_seed;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV");
    auto* preset_opt = sweep->add_option("--preset", preset_name, "fig2|fig3|fig4|fig5|fig6");
    auto* spec_opt = sweep->add_option("--spec", spec_path, "JSON sweep spec")->check(CLI::ExistingFile);
    preset_opt->excludes(spec_opt);
    sweep->add_option("--out", out, "CSV destination, '-' for stdout")->required();
    sweep->add_flag("--with-sim", with_sim, "simulate every chosen mapping");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_seed, "single simulation seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*model) return run_model(model_flags, dump);
        if (*optimize) return run_optimize(opt_flags, deltas);
        if (*simulate) return run_simulate(sim_flags, mapping, sim_seed, duration, saturated, trace_path);
        if (*sweep) {
            if (preset_name.empty() && spec_path.empty()) {
                std::fprintf(stderr, "error: sweep needs --preset or --spec\n");
                return 2;
            }
            return run_sweep_cmd(preset_name, spec_path, out, with_sim, jobs, sweep_seed);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
