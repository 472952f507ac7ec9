#include "edcamap/errors.hpp"
#include "edcamap/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace edcamap {

MappingEvaluation evaluate_mapping(const MappingVector& mapping, const Scenario& scenario, const SystemSolution& sol) {
    if (mapping.layer_count() != scenario.layer_count) {
        throw std::invalid_argument("mapping does not cover the scenario's layer count");
    }
    MappingEvaluation eval;
    eval.mapping = mapping;
    for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
        const AcSolution& s = sol.per_ac[ac];
        const int count = mapping[ac];
        eval.lambda[ac] = count * scenario.per_layer_rate;
        if (count == 0) {
            eval.drop[ac] = s.p_drop_retry;
            continue;
        }
        if (!scenario.ac_configs[ac].active || !std::isfinite(s.access_delay_s)) {
            // Starved category: every layer sent through it is lost.
            eval.rho[ac] = std::numeric_limits<double>::infinity();
            eval.queue_drop[ac] = 1.0;
            eval.drop[ac] = 1.0;
            continue;
        }
        eval.rho[ac] = offered_load(eval.lambda[ac], s.access_delay_s);
        eval.queue_drop[ac] = queue_drop_prob(eval.rho[ac], scenario.queue_capacity);
        eval.drop[ac] = total_drop_prob(s.p_drop_retry, eval.queue_drop[ac]);
    }
    eval.expected_useful_layers = expected_useful_layers_dp(mapping, eval.drop);
    return eval;
}

MappingObjective pipeline_objective(const Scenario& scenario, const SystemSolution& sol) {
    return [&scenario, &sol](const MappingVector& m) { return evaluate_mapping(m, scenario, sol).expected_useful_layers; };
}

MappingObjective fixed_drop_objective(const PerAc<double>& per_ac_drop) {
    return [per_ac_drop](const MappingVector& m) { return expected_useful_layers_dp(m, per_ac_drop); };
}

bool ranks_above(double a_value, const MappingVector& a, double b_value, const MappingVector& b) {
    if (a_value != b_value) {
        return a_value > b_value;
    }
    return a.counts() > b.counts();
}

SearchResult best_over(std::span<const MappingVector> candidates, const MappingObjective& objective) {
    if (candidates.empty()) {
        throw EmptyDomainError("no candidate mapping vectors");
    }
    SearchResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const auto& candidate : candidates) {
        const double value = objective(candidate);
        if (best.candidates == 0 || ranks_above(value, candidate, best.value, best.mapping)) {
            best.mapping = candidate;
            best.value = value;
        }
        ++best.candidates;
    }
    return best;
}

SearchResult best_exhaustive(int layers, const MappingObjective& objective) {
    const auto candidates = enumerate_exhaustive(layers, static_cast<int>(kNumAcs));
    return best_over(candidates, objective);
}

SearchResult best_canonical(int layers, const MappingObjective& objective) {
    const auto candidates = enumerate_canonical(layers, static_cast<int>(kNumAcs));
    return best_over(candidates, objective);
}

SearchResult best_non_canonical(int layers, const MappingObjective& objective) {
    auto candidates = enumerate_exhaustive(layers, static_cast<int>(kNumAcs));
    std::erase_if(candidates, [](const MappingVector& v) { return is_canonical(v); });
    return best_over(candidates, objective);
}

SearchResult best_exhaustive(const Scenario& scenario, const SystemSolution& sol) {
    return best_exhaustive(scenario.layer_count, pipeline_objective(scenario, sol));
}

SearchResult best_canonical(const Scenario& scenario, const SystemSolution& sol) {
    return best_canonical(scenario.layer_count, pipeline_objective(scenario, sol));
}

SearchResult best_non_canonical(const Scenario& scenario, const SystemSolution& sol) {
    return best_non_canonical(scenario.layer_count, pipeline_objective(scenario, sol));
}

namespace {

class OcomLevel {
public:
    OcomLevel(int layers, int level, const MappingObjective& objective, SearchResult& best)
        : layers_(layers), level_(level), objective_(objective), best_(best) {}

    void run() {
        counts_.assign(static_cast<std::size_t>(level_), 0);
        if (level_ == 1) {
            counts_[0] = layers_;
            consider();
            return;
        }
        loop(1, 0);
    }

private:
    // Position `pos` (0-based, >= 1) of the level's vector; `tail_sum` is the
    // layers already placed at positions 1..pos-1. AC_1 takes the remainder.
    void loop(int pos, int tail_sum) {
        const int still_to_place = level_ - pos - 1;
        // AC_1 must keep at least as many layers as this position.
        int upper = (layers_ - tail_sum - still_to_place) / 2;
        if (pos > 1) {
            upper = std::min(upper, counts_[static_cast<std::size_t>(pos) - 1]);
        }
        for (int m = 1; m <= upper; ++m) {
            counts_[static_cast<std::size_t>(pos)] = m;
            if (pos + 1 < level_) {
                loop(pos + 1, tail_sum + m);
                continue;
            }
            counts_[0] = layers_ - tail_sum - m;
            if (counts_[0] >= counts_[1]) {
                consider();
            }
        }
    }

    void consider() {
        const MappingVector candidate{std::span<const int>(counts_)};
        const double value = objective_(candidate);
        if (best_.candidates == 0 || ranks_above(value, candidate, best_.value, best_.mapping)) {
            best_.mapping = candidate;
            best_.value = value;
        }
        ++best_.candidates;
    }

    int layers_;
    int level_;
    const MappingObjective& objective_;
    SearchResult& best_;
    std::vector<int> counts_;
};

} // namespace

SearchResult ocom_search(int layers, int n, const MappingObjective& objective, const OcomOptions& options) {
    if (layers < 1) {
        throw std::invalid_argument("layer count must be >= 1");
    }
    if (n < 1 || n > static_cast<int>(kNumAcs)) {
        throw std::invalid_argument("number of access categories must lie in [1, 4]");
    }
    SearchResult best;
    for (int level = 1; level <= n; ++level) {
        if (level > layers) {
            break; // no split gives every category a layer
        }
        OcomLevel(layers, level, objective, best).run();
        if (options.stop_when_level_adds_nothing && best.mapping[static_cast<std::size_t>(level) - 1] == 0) {
            break;
        }
    }
    return best;
}

SearchResult ocom_search(int layers, int n, const Scenario& scenario, const SystemSolution& sol,
                         const OcomOptions& options) {
    return ocom_search(layers, n, pipeline_objective(scenario, sol), options);
}

double max_rho_for_threshold(double delta, int capacity) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("delta must be > 0");
    }
    if (capacity < 1) {
        throw std::invalid_argument("queue capacity must be >= 1");
    }
    if (delta >= 1.0) {
        throw ThresholdError("blocking probability never reaches a threshold >= 1");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (queue_drop_prob(hi, capacity) < delta) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (queue_drop_prob(mid, capacity) < delta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MappingVector suboptimal_map(const Scenario& scenario, const SystemSolution& sol, double delta) {
    const double rho_star = max_rho_for_threshold(delta, scenario.queue_capacity);
    const double rate = scenario.per_layer_rate;
    int remaining = scenario.layer_count;
    PerAc<int> counts{};
    for (std::size_t ac = 0; ac < kNumAcs && remaining > 0; ++ac) {
        if (ac + 1 == kNumAcs) {
            counts[ac] = remaining; // overflow lands in the lowest category
            break;
        }
        int budget = 0;
        const double delay = sol.per_ac[ac].access_delay_s;
        if (rate == 0.0) {
            budget = remaining;
        } else if (scenario.ac_configs[ac].active && std::isfinite(delay)) {
            // rho_i = l_i * rate * E[D_i] <= rho*
            const double layers = std::floor(rho_star / (rate * delay));
            budget = static_cast<int>(std::min(layers, static_cast<double>(remaining)));
        }
        counts[ac] = budget;
        remaining -= budget;
    }
    return MappingVector(std::span<const int>(counts));
}

} // namespace edcamap
