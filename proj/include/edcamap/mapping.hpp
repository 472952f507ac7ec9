#pragma once

#include "edcamap/analytics.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace edcamap {

/// Number of video layers assigned to each access category, in priority
/// order. Layers are laid out in order: the first counts[0] layers go to AC_1,
/// the next counts[1] to AC_2 and so on, so every mapping is ordered by
/// construction. Unused categories hold 0.
class MappingVector {
public:
    MappingVector() = default;
    MappingVector(std::initializer_list<int> counts);
    explicit MappingVector(std::span<const int> counts);

    const PerAc<int>& counts() const noexcept { return counts_; }
    int operator[](std::size_t ac) const { return counts_.at(ac); }
    int layer_count() const noexcept;
    /// Index of the last category with a nonzero count, plus one.
    std::size_t active_acs() const noexcept;
    /// "3-2-2-1"
    std::string to_string() const;
    static MappingVector parse(const std::string& text);

    auto operator<=>(const MappingVector&) const = default;

private:
    PerAc<int> counts_{};
};

struct LayerDropProfile {
    std::vector<double> per_layer;
};

struct MappingEvaluation {
    MappingVector mapping;
    PerAc<double> lambda{};
    PerAc<double> rho{};
    PerAc<double> queue_drop{};
    PerAc<double> drop{};
    double expected_useful_layers = 0.0;
};

using MappingObjective = std::function<double(const MappingVector&)>;

struct SearchResult {
    MappingVector mapping;
    double value = 0.0;
    std::size_t candidates = 0;
};

struct OcomOptions {
    /// Stop after a level whose best-so-far leaves the newly added category
    /// empty. Faster, but can miss the optimum when drop probabilities are not
    /// ordered by priority.
    bool stop_when_level_adds_nothing = false;
};

// Enumeration ---------------------------------------------------------------

/// All compositions of L into at most n_max positive parts.
std::vector<MappingVector> enumerate_exhaustive(int layers, int n_max);

/// sum_{i=1}^{4} C(L-1, i-1); defined for L >= 4.
std::uint64_t exhaustive_count(int layers);

bool is_canonical(const MappingVector& v);

/// Integer partitions of L into at most n parts, non-increasing.
std::vector<MappingVector> enumerate_canonical(int layers, int n);

// Expected useful layers ----------------------------------------------------

LayerDropProfile layer_drop_profile(const MappingVector& mapping, const PerAc<double>& per_ac_drop);

/// sum_r r * prod_{i<=r}(1 - P_i) * prod_{h>r} P_h, evaluated term by term.
double expected_useful_layers_direct(const LayerDropProfile& profile);

/// Same quantity computed by the per-category recursion; linear in L.
double expected_useful_layers_dp(const MappingVector& mapping, const PerAc<double>& per_ac_drop);

inline constexpr int kOracleMaxLayers = 24;

/// Expected length of the longest received layer prefix, by enumerating all
/// 2^L independent receive/drop outcomes. Throws SizeError above 24 layers.
double exact_useful_layers_oracle(const LayerDropProfile& profile);

// Evaluation and search -----------------------------------------------------

/// Load-dependent per-category drops for a mapping and the resulting E[UL].
MappingEvaluation evaluate_mapping(const MappingVector& mapping, const Scenario& scenario, const SystemSolution& sol);

MappingObjective pipeline_objective(const Scenario& scenario, const SystemSolution& sol);
MappingObjective fixed_drop_objective(const PerAc<double>& per_ac_drop);

/// a ranks above b: larger value, then lexicographically larger counts.
bool ranks_above(double a_value, const MappingVector& a, double b_value, const MappingVector& b);

/// Throws EmptyDomainError for an empty candidate set.
SearchResult best_over(std::span<const MappingVector> candidates, const MappingObjective& objective);

SearchResult best_exhaustive(int layers, const MappingObjective& objective);
SearchResult best_canonical(int layers, const MappingObjective& objective);
SearchResult best_non_canonical(int layers, const MappingObjective& objective);

SearchResult best_exhaustive(const Scenario& scenario, const SystemSolution& sol);
SearchResult best_canonical(const Scenario& scenario, const SystemSolution& sol);
SearchResult best_non_canonical(const Scenario& scenario, const SystemSolution& sol);

/// Optimal canonical ordered mapping search: grows the number of active
/// categories one level at a time, looping over the non-increasing layer
/// splits of each level.
SearchResult ocom_search(int layers, int n, const MappingObjective& objective, const OcomOptions& options = {});
SearchResult ocom_search(int layers, int n, const Scenario& scenario, const SystemSolution& sol,
                         const OcomOptions& options = {});

/// Largest load rho whose M/M/1/K blocking probability equals delta.
double max_rho_for_threshold(double delta, int capacity);

/// Greedy threshold heuristic: fill categories in priority order while the
/// queue blocking probability stays at or below delta.
MappingVector suboptimal_map(const Scenario& scenario, const SystemSolution& sol, double delta);

} // namespace edcamap
