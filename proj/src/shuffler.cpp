#include "shufflelab/shuffler.hpp"

#include <algorithm>

#include "shufflelab/rng.hpp"

namespace shufflelab {

std::string strategy_name(const Strategy& strategy) {
    struct Visitor {
        std::string operator()(const WithReplacement&) const { return "with_replacement"; }
        std::string operator()(const RandomShuffle&) const { return "random_shuffle"; }
        std::string operator()(const SingleShuffle&) const { return "single_shuffle"; }
        std::string operator()(const FixedPermutation&) const { return "fixed_permutation"; }
    };
    return std::visit(Visitor{}, strategy);
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "with_replacement") return WithReplacement{};
    if (name == "random_shuffle") return RandomShuffle{};
    if (name == "single_shuffle") return SingleShuffle{};
    throw BadArgs("unknown strategy: " + name);
}

namespace {

void check_permutation(const std::vector<int>& pi, int n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    if (static_cast<int>(pi.size()) != n)
        throw BadArgs("FixedPermutation: length != n");
    for (int v : pi) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
            throw BadArgs("FixedPermutation: not a bijection on {0..n-1}");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

std::vector<int> uniform_permutation(int n, std::uint64_t stream_seed) {
    std::vector<int> pi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = i;
    SplitMix64 rng(stream_seed);
    fisher_yates(pi, rng);
    return pi;
}

}  // namespace

std::vector<int> epoch_indices(const Strategy& strategy, int n, int k, std::uint64_t seed) {
    if (n < 2 || k < 1) throw BadCount("epoch_indices: need n >= 2 and k >= 1");
    struct Visitor {
        int n;
        int k;
        std::uint64_t seed;
        std::vector<int> operator()(const WithReplacement&) const {
            SplitMix64 rng(sub_seed(seed, static_cast<std::uint64_t>(k)));
            std::vector<int> block(static_cast<std::size_t>(n));
            for (auto& v : block) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            return block;
        }
        std::vector<int> operator()(const RandomShuffle&) const {
            return uniform_permutation(n, sub_seed(seed, static_cast<std::uint64_t>(k)));
        }
        std::vector<int> operator()(const SingleShuffle&) const {
            return uniform_permutation(n, sub_seed(seed, 1));  // epoch-1 draw, reused
        }
        std::vector<int> operator()(const FixedPermutation& fixed) const {
            check_permutation(fixed.pi, n);
            return fixed.pi;
        }
    };
    return std::visit(Visitor{n, k, seed}, strategy);
}

std::vector<int> index_stream(const Strategy& strategy, int n, int K, std::uint64_t seed) {
    if (n < 2 || K < 1) throw BadCount("index_stream: need n >= 2 and K >= 1");
    std::vector<int> stream;
    stream.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        std::vector<int> block = epoch_indices(strategy, n, k, seed);
        stream.insert(stream.end(), block.begin(), block.end());
    }
    return stream;
}

}  // namespace shufflelab
