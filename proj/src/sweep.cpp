#include "edcamap/sweep.hpp"

#include "edcamap/errors.hpp"
#include "edcamap/simulator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace edcamap {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 5> kStrategyNames{{
    {Strategy::exhaustive, "exhaustive"},
    {Strategy::canonical, "canonical"},
    {Strategy::non_canonical, "non-canonical"},
    {Strategy::ocom, "ocom"},
    {Strategy::suboptimal, "suboptimal"},
}};

struct GridPoint {
    int n_stations;
    int layers;
    int txop;
    double rate;
};

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
    std::vector<GridPoint> points;
    for (int n : spec.n_grid) {
        for (int l : spec.l_grid) {
            for (int txop : spec.txop_grid) {
                for (double rate : spec.rate_grid) {
                    points.push_back({n, l, txop, rate});
                }
            }
        }
    }
    return points;
}

void fill_evaluation(ResultRow& row, const MappingVector& mapping, const Scenario& scenario,
                     const SystemSolution& sol) {
    const MappingEvaluation eval = evaluate_mapping(mapping, scenario, sol);
    row.mapping = mapping;
    row.e_ul_model = eval.expected_useful_layers;
    row.p_drop = eval.drop;
    if (scenario.layer_count <= kOracleMaxLayers) {
        row.e_ul_oracle = exact_useful_layers_oracle(layer_drop_profile(mapping, eval.drop));
    }
}

void fill_simulation(ResultRow& row, const SweepSpec& spec, const Scenario& scenario) {
    double avg_ul = 0.0;
    PerAc<double> throughput{};
    for (std::uint64_t seed : spec.seeds) {
        SimConfig cfg;
        cfg.scenario = scenario;
        cfg.mapping = *row.mapping;
        cfg.seed = seed;
        cfg.sim_duration_s = spec.sim_duration_s;
        const SimStats stats = run_simulation(cfg);
        avg_ul += stats.avg_useful_layers;
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            throughput[ac] += stats.per_ac[ac].throughput_bps;
        }
    }
    const auto runs = static_cast<double>(spec.seeds.size());
    row.sim_avg_ul = avg_ul / runs;
    for (double& s : throughput) {
        s /= runs;
    }
    row.sim_throughput = throughput;
}

std::vector<ResultRow> run_point(const SweepSpec& spec, const GridPoint& point) {
    Scenario scenario = spec.base;
    scenario.n_stations = point.n_stations;
    scenario.layer_count = point.layers;
    scenario.per_layer_rate = point.rate;
    scenario.set_txop(point.txop);

    std::vector<ResultRow> rows;
    auto blank_row = [&](Strategy strategy, std::optional<double> delta) {
        ResultRow row;
        row.n_stations = point.n_stations;
        row.layers = point.layers;
        row.txop = point.txop;
        row.rate = point.rate;
        row.strategy = strategy;
        row.delta = delta;
        return row;
    };

    std::optional<SystemSolution> sol;
    std::string solver_status = "ok";
    try {
        sol = solve_fixed_point(scenario);
    } catch (const SolverError&) {
        solver_status = "solver_error";
    } catch (const std::invalid_argument&) {
        solver_status = "invalid_scenario";
    }

    for (Strategy strategy : spec.strategies) {
        std::vector<std::optional<double>> deltas{std::nullopt};
        if (strategy == Strategy::suboptimal) {
            deltas.assign(spec.delta_grid.begin(), spec.delta_grid.end());
        }
        for (const auto& delta : deltas) {
            ResultRow row = blank_row(strategy, delta);
            if (!sol) {
                row.status = solver_status;
                rows.push_back(row);
                continue;
            }
            try {
                const MappingObjective objective = pipeline_objective(scenario, *sol);
                MappingVector chosen;
                switch (strategy) {
                case Strategy::exhaustive:
                    chosen = best_exhaustive(scenario.layer_count, objective).mapping;
                    break;
                case Strategy::canonical:
                    chosen = best_canonical(scenario.layer_count, objective).mapping;
                    break;
                case Strategy::non_canonical:
                    chosen = best_non_canonical(scenario.layer_count, objective).mapping;
                    break;
                case Strategy::ocom:
                    chosen = ocom_search(scenario.layer_count, static_cast<int>(kNumAcs), objective).mapping;
                    break;
                case Strategy::suboptimal:
                    chosen = suboptimal_map(scenario, *sol, *delta);
                    break;
                }
                fill_evaluation(row, chosen, scenario, *sol);
                if (spec.with_simulation) {
                    fill_simulation(row, spec, scenario);
                }
            } catch (const EmptyDomainError&) {
                row = blank_row(strategy, delta);
                row.status = "empty_domain";
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace

std::string_view to_string(Strategy s) {
    for (const auto& [value, name] : kStrategyNames) {
        if (value == s) {
            return name;
        }
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (const auto& [value, text] : kStrategyNames) {
        if (text == name) {
            return value;
        }
    }
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

void SweepSpec::validate() const {
    base.validate();
    if (rate_grid.empty() || n_grid.empty() || l_grid.empty() || txop_grid.empty() || delta_grid.empty()) {
        throw std::invalid_argument("sweep grids must be nonempty");
    }
    if (strategies.empty()) {
        throw std::invalid_argument("at least one strategy is required");
    }
    if (with_simulation && seeds.empty()) {
        throw std::invalid_argument("simulation requires at least one seed");
    }
    if (jobs < 1) {
        throw std::invalid_argument("jobs must be >= 1");
    }
    for (double rate : rate_grid) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("rates must be finite and >= 0");
        }
    }
    for (double delta : delta_grid) {
        if (!(delta > 0.0 && delta < 1.0)) {
            throw std::invalid_argument("delta must lie in (0, 1)");
        }
    }
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<GridPoint> points = expand_grid(spec);
    std::vector<std::vector<ResultRow>> per_point(points.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            per_point[i] = run_point(spec, points[i]);
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), points.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    std::vector<ResultRow> rows;
    for (auto& chunk : per_point) {
        rows.insert(rows.end(), chunk.begin(), chunk.end());
    }
    return rows;
}

std::vector<double> default_rate_grid(const Scenario& scenario) {
    const SystemSolution sol = solve_fixed_point(scenario);
    const double delay = sol.per_ac[0].access_delay_s;
    if (!std::isfinite(delay)) {
        throw StarvedClassError("AC_1 has no service rate in the reference scenario");
    }
    const double service_rate = 1.0 / delay;
    constexpr int kPoints = 16;
    const double lo = std::log(0.01 * service_rate);
    const double hi = std::log(1.20 * service_rate);
    std::vector<double> grid;
    for (int i = 0; i < kPoints; ++i) {
        grid.push_back(std::exp(lo + (hi - lo) * i / (kPoints - 1)));
    }
    return grid;
}

} // namespace edcamap
