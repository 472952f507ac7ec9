#include "edcamap/mapping.hpp"

#include "edcamap/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace edcamap {

namespace {

void check_counts(std::span<const int> counts) {
    if (counts.size() > kNumAcs) {
        throw std::invalid_argument("a mapping vector has at most 4 entries");
    }
    for (int c : counts) {
        if (c < 0) {
            throw std::invalid_argument("mapping counts must be >= 0");
        }
    }
}

// Compositions of `remaining` into exactly `parts` positive parts, appended
// after `prefix`.
void compose(int remaining, int parts, std::vector<int>& prefix, std::vector<MappingVector>& out) {
    if (parts == 1) {
        prefix.push_back(remaining);
        out.emplace_back(std::span<const int>(prefix));
        prefix.pop_back();
        return;
    }
    for (int first = remaining - (parts - 1); first >= 1; --first) {
        prefix.push_back(first);
        compose(remaining - first, parts - 1, prefix, out);
        prefix.pop_back();
    }
}

// Non-increasing partitions of `remaining` into exactly `parts` parts, each
// at most `cap`.
void partition(int remaining, int parts, int cap, std::vector<int>& prefix, std::vector<MappingVector>& out) {
    if (parts == 1) {
        if (remaining <= cap) {
            prefix.push_back(remaining);
            out.emplace_back(std::span<const int>(prefix));
            prefix.pop_back();
        }
        return;
    }
    const int lowest = (remaining + parts - 1) / parts;
    for (int first = std::min(cap, remaining - (parts - 1)); first >= lowest; --first) {
        prefix.push_back(first);
        partition(remaining - first, parts - 1, first, prefix, out);
        prefix.pop_back();
    }
}

void check_layers(int layers, int n) {
    if (layers < 1) {
        throw std::invalid_argument("layer count must be >= 1");
    }
    if (n < 1 || n > static_cast<int>(kNumAcs)) {
        throw std::invalid_argument("number of access categories must lie in [1, 4]");
    }
}

double power(double base, int exponent) {
    // std::pow(0, 0) == 1
    return std::pow(base, exponent);
}

} // namespace

MappingVector::MappingVector(std::initializer_list<int> counts)
    : MappingVector(std::span<const int>(counts.begin(), counts.size())) {}

MappingVector::MappingVector(std::span<const int> counts) {
    check_counts(counts);
    std::copy(counts.begin(), counts.end(), counts_.begin());
}

int MappingVector::layer_count() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), 0);
}

std::size_t MappingVector::active_acs() const noexcept {
    std::size_t n = kNumAcs;
    while (n > 0 && counts_[n - 1] == 0) {
        --n;
    }
    return n;
}

std::string MappingVector::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < kNumAcs; ++i) {
        if (i > 0) {
            out << '-';
        }
        out << counts_[i];
    }
    return out.str();
}

MappingVector MappingVector::parse(const std::string& text) {
    std::vector<int> counts;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, '-')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed mapping vector: " + text);
        }
        if (used != token.size()) {
            throw std::invalid_argument("malformed mapping vector: " + text);
        }
        counts.push_back(value);
    }
    if (counts.empty()) {
        throw std::invalid_argument("empty mapping vector");
    }
    return MappingVector(std::span<const int>(counts));
}

std::vector<MappingVector> enumerate_exhaustive(int layers, int n_max) {
    check_layers(layers, n_max);
    std::vector<MappingVector> out;
    std::vector<int> prefix;
    for (int parts = 1; parts <= std::min(n_max, layers); ++parts) {
        compose(layers, parts, prefix, out);
    }
    return out;
}

std::uint64_t exhaustive_count(int layers) {
    if (layers < 4) {
        throw std::invalid_argument("exhaustive_count is defined for L >= 4");
    }
    const std::uint64_t m = static_cast<std::uint64_t>(layers) - 1;
    return 1 + m + m * (m - 1) / 2 + m * (m - 1) * (m - 2) / 6;
}

bool is_canonical(const MappingVector& v) {
    const auto& c = v.counts();
    return std::is_sorted(c.begin(), c.end(), std::greater<>());
}

std::vector<MappingVector> enumerate_canonical(int layers, int n) {
    check_layers(layers, n);
    std::vector<MappingVector> out;
    std::vector<int> prefix;
    for (int parts = 1; parts <= std::min(n, layers); ++parts) {
        partition(layers, parts, layers, prefix, out);
    }
    return out;
}

LayerDropProfile layer_drop_profile(const MappingVector& mapping, const PerAc<double>& per_ac_drop) {
    LayerDropProfile profile;
    profile.per_layer.reserve(static_cast<std::size_t>(mapping.layer_count()));
    for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
        const double p = per_ac_drop[ac];
        if (mapping[ac] > 0 && !(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("drop probabilities must lie in [0, 1]");
        }
        profile.per_layer.insert(profile.per_layer.end(), static_cast<std::size_t>(mapping[ac]), p);
    }
    return profile;
}

double expected_useful_layers_direct(const LayerDropProfile& profile) {
    const auto& p = profile.per_layer;
    const std::size_t layers = p.size();
    double total = 0.0;
    for (std::size_t r = 1; r <= layers; ++r) {
        double received = 1.0;
        for (std::size_t i = 0; i < r; ++i) {
            received *= 1.0 - p[i];
        }
        double dropped = 1.0;
        for (std::size_t h = r; h < layers; ++h) {
            dropped *= p[h];
        }
        total += static_cast<double>(r) * received * dropped;
    }
    return total;
}

double expected_useful_layers_dp(const MappingVector& mapping, const PerAc<double>& per_ac_drop) {
    double expected = 0.0;
    double prefix_received = 1.0;
    int prefix_layers = 0;
    for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
        const int count = mapping[ac];
        if (count == 0) {
            continue;
        }
        const double p = per_ac_drop[ac];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("drop probabilities must lie in [0, 1]");
        }
        double block = 0.0;
        for (int i = 1; i <= count; ++i) {
            block += (i + prefix_layers) * power(1.0 - p, i) * power(p, count - i);
        }
        expected = expected * power(p, count) + prefix_received * block;
        prefix_received *= power(1.0 - p, count);
        prefix_layers += count;
    }
    return expected;
}

double exact_useful_layers_oracle(const LayerDropProfile& profile) {
    const auto& p = profile.per_layer;
    if (p.size() > static_cast<std::size_t>(kOracleMaxLayers)) {
        throw SizeError("exact_useful_layers_oracle: more than 24 layers");
    }
    for (double x : p) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("drop probabilities must lie in [0, 1]");
        }
    }
    // Bit i of an outcome is set when layer i + 1 is received; the useful
    // layers are the run of set bits starting at bit 0.
    const std::uint32_t outcomes = std::uint32_t{1} << p.size();
    double expected = 0.0;
    for (std::uint32_t outcome = 0; outcome < outcomes; ++outcome) {
        double probability = 1.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            probability *= ((outcome >> i) & 1U) != 0 ? 1.0 - p[i] : p[i];
        }
        expected += probability * std::countr_one(outcome);
    }
    return expected;
}

} // namespace edcamap
