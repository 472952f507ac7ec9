#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edcamap/errors.hpp"
#include "edcamap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <tuple>

using namespace edcamap;

namespace {

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    write_csv(rows, out);
    return out.str();
}

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

SweepSpec single_point(Strategy strategy) {
    SweepSpec spec;
    spec.n_grid = {10};
    spec.l_grid = {8};
    spec.txop_grid = {5};
    spec.rate_grid = {12.0};
    spec.strategies = {strategy};
    return spec;
}

} // namespace

TEST_CASE("presets follow the figure captions") {
    CHECK(preset("fig2").base.n_stations == 10);
    CHECK(preset("fig2").base.layer_count == 8);
    CHECK(preset("fig3").base.n_stations == 18);
    CHECK(preset("fig4").base.layer_count == 20);
    CHECK(preset("fig4").base.n_stations == 18);
    CHECK(preset("fig5").txop_grid == std::vector<int>{2});
    CHECK(preset("fig6").delta_grid == std::vector<double>{0.10, 0.20});
    CHECK(preset("fig6").base.n_stations == 5);
    CHECK(preset("fig6").base.layer_count == 6);
    CHECK_THROWS_AS(preset("fig7"), std::invalid_argument);
    CHECK(preset_names() == std::vector<std::string>{"fig2", "fig3", "fig4", "fig5", "fig6"});

    const SweepSpec spec = preset("fig2");
    const auto& ac = spec.base.ac_configs;
    CHECK(ac[0].cw_min == 7);
    CHECK(ac[1].cw_max == 31);
    CHECK(ac[2].aifsn == 3);
    CHECK(ac[3].retry_limit == 4);
    CHECK(spec.base.phy.sifs_us == 16.0);
    CHECK(spec.base.phy.slot_time_us == 9.0);
    CHECK(spec.base.packet_length_bytes == 1024);
    CHECK(spec.rate_grid.size() == 16);
}

TEST_CASE("default rate grid spans 1% to 120% of the AC_1 service rate") {
    Scenario s;
    s.set_txop(5);
    const double mu = 1.0 / solve_fixed_point(s).per_ac[0].access_delay_s;
    const auto grid = default_rate_grid(s);
    REQUIRE(grid.size() == 16);
    CHECK(grid.front() == doctest::Approx(0.01 * mu).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(1.2 * mu).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
    }
}

TEST_CASE("single grid point, canonical strategy") {
    const auto rows = run_sweep(single_point(Strategy::canonical));
    REQUIRE(rows.size() == 1);
    Scenario s;
    s.per_layer_rate = 12.0;
    s.set_txop(5);
    const SystemSolution sol = solve_fixed_point(s);
    CHECK(rows[0].mapping == ocom_search(8, 4, s, sol).mapping);
    CHECK(rows[0].status == "ok");
    CHECK(rows[0].e_ul_oracle.has_value());
    CHECK_FALSE(rows[0].delta.has_value());
}

TEST_CASE("row order and heuristic expansion") {
    SweepSpec spec;
    spec.n_grid = {5, 10};
    spec.l_grid = {6};
    spec.txop_grid = {2, 5};
    spec.rate_grid = {1.0, 30.0};
    spec.delta_grid = {0.1, 0.2};
    spec.strategies = {Strategy::canonical, Strategy::suboptimal};
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 2 * 2 * 2 * 3);
    CHECK(rows[0].n_stations == 5);
    CHECK(rows[0].txop == 2);
    CHECK(rows[0].rate == 1.0);
    CHECK(rows[0].strategy == Strategy::canonical);
    CHECK(rows[1].strategy == Strategy::suboptimal);
    CHECK(rows[1].delta == 0.1);
    CHECK(rows[2].delta == 0.2);
    CHECK(rows[3].rate == 30.0);
    CHECK(rows[6].txop == 5);
    CHECK(rows[12].n_stations == 10);
    for (const auto& r : rows) {
        REQUIRE(r.mapping.has_value());
        CHECK(r.mapping->layer_count() == r.layers);
        CHECK(*r.e_ul_model >= 0.0);
        CHECK(*r.e_ul_model <= r.layers);
    }
}

TEST_CASE("worker count does not change the output") {
    SweepSpec spec = preset("fig5");
    const std::string serial = to_csv(run_sweep(spec));
    spec.jobs = 4;
    CHECK(to_csv(run_sweep(spec)) == serial);
}

TEST_CASE("simulation columns are reproducible") {
    SweepSpec spec = single_point(Strategy::ocom);
    spec.rate_grid = {3.0, 20.0};
    spec.with_simulation = true;
    spec.sim_duration_s = 10.0;
    spec.seeds = {1, 2};
    spec.jobs = 2;
    const auto a = run_sweep(spec);
    const auto b = run_sweep(spec);
    CHECK(to_csv(a) == to_csv(b));
    for (const auto& r : a) {
        CHECK(r.sim_avg_ul.has_value());
        CHECK(r.sim_throughput.has_value());
    }
}

TEST_CASE("failing grid points are recorded and the sweep continues") {
    SweepSpec spec = single_point(Strategy::canonical);
    spec.n_grid = {0, 10};
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "invalid_scenario");
    CHECK_FALSE(rows[0].mapping.has_value());
    CHECK(rows[1].status == "ok");

    SweepSpec tiny = single_point(Strategy::non_canonical);
    tiny.l_grid = {1};
    const auto empty = run_sweep(tiny);
    CHECK(empty[0].status == "empty_domain");
}

TEST_CASE("fig2: strategy values") {
    const auto rows = run_sweep(preset("fig2"));
    std::map<std::tuple<int, double>, std::map<Strategy, double>> best;
    for (const auto& r : rows) {
        best[{r.txop, r.rate}][r.strategy] = *r.e_ul_model;
    }
    CHECK(best.size() == 32);
    const auto grid = preset("fig2").rate_grid;
    int losses = 0;
    for (const auto& [point, values] : best) {
        const double canonical = values.at(Strategy::canonical);
        const double other = values.at(Strategy::non_canonical);
        CHECK(values.at(Strategy::exhaustive) == std::max(canonical, other));
        CHECK(values.at(Strategy::ocom) == canonical);
        if (std::get<1>(point) <= grid[5]) {
            CHECK(canonical >= other);
        }
        losses += canonical < other;
    }
    // Past the knee a split that parks layers in AC_3 unloads AC_1 and wins.
    CHECK(losses > 0);
}

TEST_CASE("fig6: heuristic rows at low rate") {
    const auto rows = run_sweep(preset("fig6"));
    const double lowest = preset("fig6").rate_grid.front();
    std::map<std::optional<double>, double> at_lowest;
    for (const auto& r : rows) {
        if (r.rate == lowest && r.strategy == Strategy::suboptimal) {
            at_lowest[r.delta] = *r.e_ul_model;
            // AC_1's budget covers every layer.
            CHECK(r.mapping == MappingVector{6});
        }
    }
    REQUIRE(at_lowest.size() == 2);
    CHECK(at_lowest.at(0.10) >= at_lowest.at(0.20));
}

TEST_CASE("CSV layout") {
    const auto rows = run_sweep(single_point(Strategy::canonical));
    const std::string text = to_csv(rows);
    CHECK(count_lines(text) == 3);
    CHECK(text.rfind(std::string(kCsvSchemaLine) + "\n" + std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(text.back() == '\n');
    CHECK_THROWS_AS(to_csv({}), std::invalid_argument);
    CHECK_THROWS_AS(emit_csv({}, "unused.csv"), std::invalid_argument);
    CHECK_THROWS_AS(emit_csv(rows, "/nonexistent-dir/out.csv"), std::runtime_error);

    const auto path = std::filesystem::temp_directory_path() / "edcamap_layout.csv";
    emit_csv(rows, path.string());
    std::ifstream in(path);
    std::stringstream file;
    file << in.rdbuf();
    CHECK(file.str() == text);
    std::filesystem::remove(path);
}

TEST_CASE("CSV round trip") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ResultRow> rows;
    for (int i = 0; i < 200; ++i) {
        ResultRow r;
        r.n_stations = 1 + i % 30;
        r.layers = 8;
        r.txop = i % 21;
        r.rate = unit(rng) * 1e3;
        r.strategy = static_cast<Strategy>(i % 5);
        if (r.strategy == Strategy::suboptimal) {
            r.delta = unit(rng);
        }
        if (i % 7 == 0) {
            r.status = "solver_error";
        } else {
            r.mapping = MappingVector{5, 2, 1};
            r.e_ul_model = unit(rng) * 8;
            if (i % 3 != 0) {
                r.e_ul_oracle = unit(rng) * 8;
            }
            r.p_drop = PerAc<double>{unit(rng), unit(rng) * 1e-17, 1.0, 0.0};
            if (i % 2 == 0) {
                r.sim_avg_ul = unit(rng) * 8;
                r.sim_throughput = PerAc<double>{unit(rng) * 6e6, 1.0 / 3.0, 0.0, 12345.678};
            }
        }
        rows.push_back(r);
    }
    std::istringstream in(to_csv(rows));
    const auto back = parse_csv(in);
    CHECK(back == rows);

    std::istringstream bad("not a csv\n");
    CHECK_THROWS_AS(parse_csv(bad), std::invalid_argument);
}

TEST_CASE("scenario config files") {
    std::istringstream in(R"({"n_stations": 18, "layer_count": 20, "txop_packets": 5,
                              "phy": {"slot_time_us": 20},
                              "ac_configs": [{}, {"cw_min": 7}, {}, {"active": false}]})");
    const Scenario s = load_scenario(in);
    CHECK(s.n_stations == 18);
    CHECK(s.layer_count == 20);
    CHECK(s.ac_configs[2].txop_packets == 5);
    CHECK(s.phy.slot_time_us == 20.0);
    CHECK(s.phy.sifs_us == 16.0);
    CHECK(s.ac_configs[1].cw_min == 7);
    CHECK(s.ac_configs[1].cw_max == 31);
    CHECK_FALSE(s.ac_configs[3].active);

    std::istringstream dumped(dump_scenario(s));
    const Scenario again = load_scenario(dumped);
    CHECK(dump_scenario(again) == dump_scenario(s));

    std::istringstream broken("{\"n_stations\": ");
    CHECK_THROWS_AS(load_scenario(broken), std::invalid_argument);
    std::istringstream wrong_type(R"({"n_stations": "ten"})");
    CHECK_THROWS_AS(load_scenario(wrong_type), std::invalid_argument);
    std::istringstream invalid(R"({"n_stations": 0})");
    CHECK_THROWS_AS(load_scenario(invalid), std::invalid_argument);
}

TEST_CASE("sweep spec files") {
    std::istringstream from_preset(R"({"preset": "fig5", "jobs": 3})");
    const SweepSpec a = load_sweep_spec(from_preset);
    CHECK(a.jobs == 3);
    CHECK(a.rate_grid == preset("fig5").rate_grid);
    CHECK(a.delta_grid == std::vector<double>{0.10, 0.20});

    std::istringstream custom(R"({"base": {"layer_count": 6}, "n_grid": [5], "rate_grid": [1, 2],
                                  "strategies": ["canonical", "suboptimal"]})");
    const SweepSpec b = load_sweep_spec(custom);
    CHECK(b.l_grid == std::vector<int>{6});
    CHECK(b.rate_grid == std::vector<double>{1, 2});
    CHECK(b.delta_grid == std::vector<double>{0.10});
    CHECK(b.strategies == std::vector<Strategy>{Strategy::canonical, Strategy::suboptimal});

    std::istringstream derived(R"({"n_grid": [18], "l_grid": [8], "txop_grid": [20], "strategies": ["ocom"]})");
    const SweepSpec c = load_sweep_spec(derived);
    Scenario ref;
    ref.n_stations = 18;
    ref.set_txop(20);
    CHECK(c.rate_grid == default_rate_grid(ref));

    std::istringstream unknown(R"({"strategies": ["greedy"]})");
    CHECK_THROWS_AS(load_sweep_spec(unknown), std::invalid_argument);
    std::istringstream empty_grid(R"({"strategies": ["ocom"], "rate_grid": []})");
    CHECK_THROWS_AS(load_sweep_spec(empty_grid), std::invalid_argument);
}
