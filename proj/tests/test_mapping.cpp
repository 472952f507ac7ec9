#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edcamap/errors.hpp"
#include "edcamap/mapping.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace edcamap;

namespace {

// All 4-tuples summing to L whose zeros only trail, by brute force.
std::set<MappingVector> brute_force_compositions(int layers) {
    std::set<MappingVector> out;
    for (int a = 1; a <= layers; ++a) {
        for (int b = 0; b <= layers - a; ++b) {
            for (int c = 0; c <= layers - a - b; ++c) {
                const int d = layers - a - b - c;
                if ((b == 0 && c > 0) || (c == 0 && d > 0)) {
                    continue;
                }
                out.insert(MappingVector{a, b, c, d});
            }
        }
    }
    return out;
}

// p(n, k): partitions of n into at most k parts.
std::uint64_t partitions_at_most(int n, int k) {
    if (n == 0) return 1;
    if (k == 0) return 0;
    if (k > n) return partitions_at_most(n, n);
    return partitions_at_most(n, k - 1) + partitions_at_most(n - k, k);
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

LayerDropProfile profile(std::initializer_list<double> p) {
    return LayerDropProfile{std::vector<double>(p)};
}

} // namespace

TEST_CASE("mapping vector text form") {
    const MappingVector v{3, 2, 2, 1};
    CHECK(v.to_string() == "3-2-2-1");
    CHECK(MappingVector::parse("3-2-2-1") == v);
    CHECK(MappingVector::parse("8") == MappingVector{8, 0, 0, 0});
    CHECK(v.layer_count() == 8);
    CHECK(MappingVector{5, 3}.active_acs() == 2);
    CHECK_THROWS_AS(MappingVector::parse("3-x"), std::invalid_argument);
    CHECK_THROWS_AS(MappingVector::parse("1-2-3-4-5"), std::invalid_argument);
    CHECK_THROWS_AS((MappingVector{2, -1}), std::invalid_argument);
}

TEST_CASE("exhaustive enumeration") {
    CHECK(enumerate_exhaustive(2, 2) == std::vector<MappingVector>{{2}, {1, 1}});
    CHECK(enumerate_exhaustive(1, 4) == std::vector<MappingVector>{{1}});
    CHECK(enumerate_exhaustive(8, 4).size() == 64);
    CHECK_THROWS_AS(enumerate_exhaustive(0, 4), std::invalid_argument);

    for (int l = 1; l <= 20; ++l) {
        const auto listed = enumerate_exhaustive(l, 4);
        const std::set<MappingVector> unique(listed.begin(), listed.end());
        CHECK(unique.size() == listed.size());
        CHECK(unique == brute_force_compositions(l));
        std::uint64_t binomial_sum = 0;
        for (std::uint64_t i = 1; i <= 4; ++i) {
            binomial_sum += choose(static_cast<std::uint64_t>(l - 1), i - 1);
        }
        CHECK(listed.size() == binomial_sum);
        if (l >= 4) {
            CHECK(exhaustive_count(l) == listed.size());
        }
    }
}

TEST_CASE("exhaustive count closed form") {
    CHECK(exhaustive_count(4) == 8);
    CHECK(exhaustive_count(8) == 64);
    CHECK(exhaustive_count(20) == 1160);
    // The printed expansion with (L-2) in place of C(L-1,1) is one short.
    const std::uint64_t printed = 1 + (8 - 2) + choose(7, 2) + choose(7, 3);
    CHECK(printed == 63);
    CHECK(exhaustive_count(8) - printed == 1);
    CHECK_THROWS_AS(exhaustive_count(3), std::invalid_argument);
}

TEST_CASE("canonical mappings") {
    CHECK(is_canonical({3, 2, 2, 1}));
    CHECK_FALSE(is_canonical({2, 3}));
    CHECK(is_canonical({8, 0, 0, 0}));

    CHECK(enumerate_canonical(4, 4) == std::vector<MappingVector>{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}});
    CHECK(enumerate_canonical(3, 1) == std::vector<MappingVector>{{3}});
    CHECK(enumerate_canonical(8, 4).size() == 15);

    for (int l = 1; l <= 24; ++l) {
        const auto canon = enumerate_canonical(l, 4);
        CHECK(canon.size() == partitions_at_most(l, 4));
        std::vector<MappingVector> filtered;
        for (const auto& v : enumerate_exhaustive(l, 4)) {
            if (is_canonical(v)) {
                filtered.push_back(v);
            }
        }
        std::vector<MappingVector> sorted = canon;
        std::sort(sorted.begin(), sorted.end());
        std::sort(filtered.begin(), filtered.end());
        CHECK(sorted == filtered);
    }
}

TEST_CASE("layer drop profile") {
    CHECK(layer_drop_profile({2, 1}, {0.1, 0.3, 0.9, 0.9}).per_layer == std::vector<double>{0.1, 0.1, 0.3});
    CHECK(layer_drop_profile({3}, {0.2, 0, 0, 0}).per_layer == std::vector<double>{0.2, 0.2, 0.2});
    CHECK(layer_drop_profile({1, 1, 1, 1}, {0.1, 0.2, 0.3, 0.4}).per_layer ==
          std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(layer_drop_profile({1, 1}, {0.1, 1.5, 0, 0}), std::invalid_argument);
}

TEST_CASE("expected useful layers, direct form") {
    CHECK(expected_useful_layers_direct(profile({0.0})) == 1.0);
    CHECK(expected_useful_layers_direct(profile({0.1, 0.3})) == doctest::Approx(1.53).epsilon(1e-15));
    CHECK(expected_useful_layers_direct(profile({0.5, 0.5, 0.5})) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(expected_useful_layers_direct(profile({})) == 0.0);
}

TEST_CASE("expected useful layers, recursion") {
    CHECK(expected_useful_layers_dp({1, 1}, {0.1, 0.3, 0, 0}) == doctest::Approx(1.53).epsilon(1e-15));
    CHECK(expected_useful_layers_dp({3}, {0, 0, 0, 0}) == 3.0);
    CHECK(expected_useful_layers_dp({2, 2}, {0.1, 0.4, 0, 0}) ==
          doctest::Approx(expected_useful_layers_direct(profile({0.1, 0.1, 0.4, 0.4}))).epsilon(1e-15));
}

TEST_CASE("recursion matches the direct form on every mapping up to 12 layers") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int l = 1; l <= 12; ++l) {
        for (const auto& m : enumerate_exhaustive(l, 4)) {
            for (int draw = 0; draw < 200; ++draw) {
                PerAc<double> p{};
                for (double& x : p) {
                    x = unit(rng);
                }
                const double dp = expected_useful_layers_dp(m, p);
                const double direct = expected_useful_layers_direct(layer_drop_profile(m, p));
                worst = std::max(worst, std::abs(dp - direct));
                CHECK(dp >= 0.0);
                CHECK(dp <= l);
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("exact oracle") {
    CHECK(exact_useful_layers_oracle(profile({0.5, 0.5})) == 0.75);
    CHECK(exact_useful_layers_oracle(profile({0.5, 0.5, 0.5})) == 0.875);
    for (int l = 0; l <= 16; ++l) {
        CHECK(exact_useful_layers_oracle(LayerDropProfile{std::vector<double>(static_cast<std::size_t>(l), 0.0)}) ==
              l);
    }
    CHECK_THROWS_AS(exact_useful_layers_oracle(LayerDropProfile{std::vector<double>(25, 0.1)}), SizeError);
}

TEST_CASE("oracle and direct form agree up to two layers and split after") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int draw = 0; draw < 2000; ++draw) {
        const double a = unit(rng);
        const double b = unit(rng);
        CHECK(std::abs(exact_useful_layers_oracle(profile({a})) - expected_useful_layers_direct(profile({a}))) <=
              1e-15);
        CHECK(std::abs(exact_useful_layers_oracle(profile({a, b})) -
                       expected_useful_layers_direct(profile({a, b}))) <= 1e-15);
        for (int l = 3; l <= 10; ++l) {
            const LayerDropProfile uniform{std::vector<double>(static_cast<std::size_t>(l), a)};
            CHECK(exact_useful_layers_oracle(uniform) >= expected_useful_layers_direct(uniform) - 1e-15);
        }
    }
}

TEST_CASE("direct form is monotone for small drop probabilities") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> half(0.0, 0.1);
    std::uniform_int_distribution<int> length(1, 10);
    for (int draw = 0; draw < 3000; ++draw) {
        LayerDropProfile p{std::vector<double>(static_cast<std::size_t>(length(rng)))};
        for (double& x : p.per_layer) {
            x = half(rng);
        }
        const double base = expected_useful_layers_direct(p);
        const double base_exact = exact_useful_layers_oracle(p);
        for (std::size_t i = 0; i < p.per_layer.size(); ++i) {
            LayerDropProfile q = p;
            q.per_layer[i] = std::min(0.1, q.per_layer[i] + 0.02);
            CHECK(expected_useful_layers_direct(q) <= base + 1e-13);
            CHECK(exact_useful_layers_oracle(q) <= base_exact + 1e-13);
        }
    }
}

TEST_CASE("exact oracle is monotone for any drop probability") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int draw = 0; draw < 2000; ++draw) {
        LayerDropProfile p{std::vector<double>(6)};
        for (double& x : p.per_layer) {
            x = unit(rng);
        }
        const double base = exact_useful_layers_oracle(p);
        for (std::size_t i = 0; i < p.per_layer.size(); ++i) {
            LayerDropProfile q = p;
            q.per_layer[i] = std::min(1.0, q.per_layer[i] + 0.1);
            CHECK(exact_useful_layers_oracle(q) <= base + 1e-13);
        }
    }
}

TEST_CASE("direct form rises with a later drop once an earlier layer is likely lost") {
    // dE/dP_3 = (1 - P_1)(2 P_2 - 1) for three layers.
    const double low = expected_useful_layers_direct(profile({0.1, 0.8, 0.3}));
    const double high = expected_useful_layers_direct(profile({0.1, 0.8, 0.6}));
    CHECK(high - low == doctest::Approx(0.9 * 0.6 * 0.3).epsilon(1e-12));
    CHECK(exact_useful_layers_oracle(profile({0.1, 0.8, 0.6})) < exact_useful_layers_oracle(profile({0.1, 0.8, 0.3})));

    // Ten layers, only layer 9 lossy: dE/dP_10 = 8 * 0.2 + 9 * 0.8 - 10 * 0.8.
    LayerDropProfile ten{std::vector<double>(10, 0.0)};
    ten.per_layer[8] = 0.2;
    const double before = expected_useful_layers_direct(ten);
    ten.per_layer[9] = 0.1;
    CHECK(expected_useful_layers_direct(ten) - before == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("bounds on every variant") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int l = 1; l <= 10; ++l) {
        for (const auto& m : enumerate_canonical(l, 4)) {
            PerAc<double> p{};
            for (double& x : p) {
                x = unit(rng);
            }
            const auto prof = layer_drop_profile(m, p);
            for (double v : {expected_useful_layers_direct(prof), expected_useful_layers_dp(m, p),
                             exact_useful_layers_oracle(prof)}) {
                CHECK(v >= 0.0);
                CHECK(v <= l);
            }
        }
    }
}
