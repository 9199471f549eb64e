#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "shufflelab/types.hpp"

namespace shufflelab {

// Component-index sampling strategies. Indices are 0-based internally and
// 1-based in logs/CSV, matching the usual epoch notation.
struct WithReplacement {};
struct RandomShuffle {};
struct SingleShuffle {};
struct FixedPermutation {
    std::vector<int> pi;  // a bijection on {0..n-1}
};

using Strategy = std::variant<WithReplacement, RandomShuffle, SingleShuffle, FixedPermutation>;

std::string strategy_name(const Strategy& strategy);

// Parses the three parameterless strategy names ("with_replacement",
// "random_shuffle", "single_shuffle"); fixed permutations are programmatic.
Strategy strategy_from_name(const std::string& name);

// The length-n index block for epoch k (1-based). Epochs draw from independent
// sub-streams (sub_seed(seed, k)), so blocks can be generated in any order or
// concurrently and still agree with the serial stream.
std::vector<int> epoch_indices(const Strategy& strategy, int n, int k, std::uint64_t seed);

// Concatenation of the K epoch blocks: nK indices in [0, n).
std::vector<int> index_stream(const Strategy& strategy, int n, int K, std::uint64_t seed);

}  // namespace shufflelab
