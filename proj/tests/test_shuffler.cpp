#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "shufflelab/shuffler.hpp"

using namespace shufflelab;

TEST_SUITE("shuffler") {

TEST_CASE("fixed identity permutation repeats verbatim") {
    FixedPermutation fixed{{0, 1, 2}};
    const auto stream = index_stream(fixed, 3, 2, 99);
    CHECK(stream == std::vector<int>{0, 1, 2, 0, 1, 2});
}

TEST_CASE("fixed permutation must be a bijection") {
    CHECK_THROWS_AS(index_stream(FixedPermutation{{0, 0, 2}}, 3, 1, 1), BadArgs);
    CHECK_THROWS_AS(index_stream(FixedPermutation{{0, 1}}, 3, 1, 1), BadArgs);
    CHECK_THROWS_AS(index_stream(FixedPermutation{{0, 1, 3}}, 3, 1, 1), BadArgs);
}

TEST_CASE("single shuffle repeats its first block") {
    const auto stream = index_stream(SingleShuffle{}, 4, 3, 1234);
    REQUIRE(stream.size() == 12);
    for (int k = 1; k < 3; ++k) {
        for (int i = 0; i < 4; ++i) CHECK(stream[4 * k + i] == stream[i]);
    }
    // The first block is a permutation of {0..3}.
    std::vector<int> block(stream.begin(), stream.begin() + 4);
    std::sort(block.begin(), block.end());
    CHECK(block == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("random shuffle visits every index exactly K times") {
    const int n = 5, K = 10000;
    const auto stream = index_stream(RandomShuffle{}, n, K, 777);
    REQUIRE(stream.size() == static_cast<std::size_t>(n * K));
    std::vector<int> counts(n, 0);
    std::vector<int> first_counts(n, 0);
    for (int k = 0; k < K; ++k) {
        std::vector<int> block(stream.begin() + n * k, stream.begin() + n * (k + 1));
        ++first_counts[block[0]];
        std::vector<int> sorted = block;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n; ++i) {
            REQUIRE(sorted[i] == i);
            ++counts[block[i]];
        }
    }
    for (int c : counts) CHECK(c == K);
    // Per-epoch leading index is uniform within 4 sigma.
    const double expected = K / static_cast<double>(n);
    const double sigma = std::sqrt(K * (1.0 / n) * (1.0 - 1.0 / n));
    for (int c : first_counts) CHECK(std::abs(c - expected) < 4.0 * sigma);
}

TEST_CASE("epoch blocks agree with the serial stream in any order") {
    const int n = 6, K = 7;
    const std::uint64_t seed = 4242;
    const auto stream = index_stream(RandomShuffle{}, n, K, seed);
    for (int k = K; k >= 1; --k) {
        const auto block = epoch_indices(RandomShuffle{}, n, k, seed);
        for (int i = 0; i < n; ++i) CHECK(block[i] == stream[n * (k - 1) + i]);
    }
}

TEST_CASE("with-replacement draws land in range and cover the support") {
    const int n = 4, K = 2000;
    const auto stream = index_stream(WithReplacement{}, n, K, 31);
    std::vector<int> counts(n, 0);
    for (int v : stream) {
        REQUIRE(v >= 0);
        REQUIRE(v < n);
        ++counts[v];
    }
    for (int c : counts) CHECK(c > 0);
}

TEST_CASE("strategy names round-trip through the parser") {
    CHECK(strategy_name(strategy_from_name("random_shuffle")) == "random_shuffle");
    CHECK(strategy_name(strategy_from_name("single_shuffle")) == "single_shuffle");
    CHECK(strategy_name(strategy_from_name("with_replacement")) == "with_replacement");
    CHECK_THROWS_AS(strategy_from_name("bogus"), BadArgs);
}

TEST_CASE("streams are reproducible per seed and differ across seeds") {
    const auto a = index_stream(RandomShuffle{}, 5, 20, 1);
    const auto b = index_stream(RandomShuffle{}, 5, 20, 1);
    const auto c = index_stream(RandomShuffle{}, 5, 20, 2);
    CHECK(a == b);
    CHECK(a != c);
}

}  // TEST_SUITE
