#pragma once

#include "edcamap/analytics.hpp"
#include "edcamap/mapping.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edcamap {

enum class Strategy { exhaustive, canonical, non_canonical, ocom, suboptimal };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct SweepSpec {
    Scenario base;
    std::vector<double> rate_grid;
    std::vector<int> n_grid;
    std::vector<int> l_grid;
    std::vector<int> txop_grid;
    std::vector<double> delta_grid{0.10};
    std::vector<Strategy> strategies;
    bool with_simulation = false;
    std::vector<std::uint64_t> seeds{1};
    double sim_duration_s = 60.0;
    /// Worker threads; output order never depends on it.
    int jobs = 1;

    void validate() const;
};

/// One CSV line. Optional fields are written as empty cells.
struct ResultRow {
    std::string status = "ok";
    int n_stations = 0;
    int layers = 0;
    int txop = 0;
    double rate = 0.0;
    std::optional<double> delta;
    Strategy strategy = Strategy::canonical;
    std::optional<MappingVector> mapping;
    std::optional<double> e_ul_model;
    std::optional<double> e_ul_oracle;
    std::optional<PerAc<double>> p_drop;
    std::optional<double> sim_avg_ul;
    std::optional<PerAc<double>> sim_throughput;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kCsvSchemaLine = "# edcamap results schema v1";
inline constexpr std::string_view kCsvHeader =
    "status,N,L,txop,rate,delta,strategy,mapping,e_ul_model,e_ul_oracle,p_drop_ac1,p_drop_ac2,p_drop_ac3,"
    "p_drop_ac4,sim_avg_ul,sim_s_ac1,sim_s_ac2,sim_s_ac3,sim_s_ac4";

/// Rows in grid order: N, then L, then TXOP, then rate; within a grid point
/// the requested strategies in order, the threshold heuristic once per delta.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
/// Throws std::invalid_argument for no rows and std::runtime_error when the
/// file cannot be written.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv(std::istream& in);

/// 16 log-spaced per-layer rates from 1% to 120% of AC_1's saturation
/// service rate 1 / E[D_1] in `scenario`.
std::vector<double> default_rate_grid(const Scenario& scenario);

/// Named figure setups: fig2, fig3, fig4, fig5, fig6.
SweepSpec preset(std::string_view name);
std::vector<std::string> preset_names();

// Config files are JSON objects whose keys mirror the Scenario and SweepSpec
// field names. Missing keys keep their defaults.
Scenario load_scenario(std::istream& in, Scenario base = {});
std::string dump_scenario(const Scenario& s);
SweepSpec load_sweep_spec(std::istream& in);

} // namespace edcamap
