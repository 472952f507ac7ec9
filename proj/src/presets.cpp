#include "edcamap/sweep.hpp"

#include <stdexcept>

namespace edcamap {

namespace {

struct PresetShape {
    std::string_view name;
    int n_stations;
    int layers;
    std::vector<int> txops;
    bool heuristic;
};

const std::vector<PresetShape>& shapes() {
    static const std::vector<PresetShape> table{
        {"fig2", 10, 8, {5, 20}, false},
        {"fig3", 18, 8, {5, 20}, false},
        {"fig4", 18, 20, {5, 20}, false},
        {"fig5", 10, 8, {2}, true},
        {"fig6", 5, 6, {5}, true},
    };
    return table;
}

} // namespace

SweepSpec preset(std::string_view name) {
    for (const PresetShape& shape : shapes()) {
        if (shape.name != name) {
            continue;
        }
        SweepSpec spec;
        spec.base.n_stations = shape.n_stations;
        spec.base.layer_count = shape.layers;
        spec.base.set_txop(shape.txops.front());
        spec.n_grid = {shape.n_stations};
        spec.l_grid = {shape.layers};
        spec.txop_grid = shape.txops;
        if (shape.heuristic) {
            spec.strategies = {Strategy::canonical, Strategy::non_canonical, Strategy::suboptimal};
            spec.delta_grid = {0.10, 0.20};
        } else {
            spec.strategies = {Strategy::exhaustive, Strategy::canonical, Strategy::non_canonical, Strategy::ocom};
        }
        spec.rate_grid = default_rate_grid(spec.base);
        return spec;
    }
    throw std::invalid_argument("unknown preset: " + std::string(name));
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const PresetShape& shape : shapes()) {
        names.emplace_back(shape.name);
    }
    return names;
}

} // namespace edcamap
