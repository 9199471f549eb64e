#include "shufflelab/concentration.hpp"

#include <atomic>
#include <cmath>

#include "shufflelab/csv.hpp"
#include "shufflelab/parallel.hpp"
#include "shufflelab/rng.hpp"

namespace shufflelab {

double hs_bound(int i, int n, double big_g, double delta) {
    if (n < 2) throw BadArgs("hs_bound: n < 2");
    if (i < 1 || i > n) throw BadArgs("hs_bound: i out of [1, n]");
    if (!(delta > 0.0 && delta < 1.0)) throw BadArgs("hs_bound: delta out of (0, 1)");
    if (big_g < 0.0) throw BadArgs("hs_bound: negative G");
    const double remaining = 1.0 - static_cast<double>(i - 1) / static_cast<double>(n);
    return big_g * std::sqrt(8.0 * remaining * std::log(2.0 / delta) / static_cast<double>(i));
}

HSInstance make_hs_instance(std::vector<Vector> vectors, int i, double delta) {
    HSInstance inst;
    inst.n = static_cast<int>(vectors.size());
    if (inst.n < 2) throw BadCount("make_hs_instance: need n >= 2");
    inst.d = static_cast<int>(vectors.front().size());
    if (inst.d < 1) throw BadDimension("make_hs_instance: empty vectors");
    if (i < 1 || i > inst.n) throw BadArgs("make_hs_instance: i out of [1, n]");
    if (!(delta > 0.0 && delta < 1.0)) throw BadArgs("make_hs_instance: delta out of (0, 1)");
    inst.mean = Vector::Zero(inst.d);
    for (const auto& v : vectors) {
        if (v.size() != inst.d) throw BadDimension("make_hs_instance: mixed dimensions");
        inst.big_g = std::max(inst.big_g, v.norm());
        inst.mean += v;
    }
    inst.mean /= static_cast<double>(inst.n);
    inst.vectors = std::move(vectors);
    inst.i = i;
    inst.delta = delta;
    return inst;
}

namespace {

// 1 iff trial t's length-i prefix average breaks the bound. Pure in (instance,
// seed, t), which is what makes the aggregate independent of work partition.
bool trial_violates(const HSInstance& instance, double threshold_sq, const Vector& target,
                    std::uint64_t seed, long t, std::vector<int>& scratch) {
    SplitMix64 rng(sub_seed(seed, static_cast<std::uint64_t>(t)));
    partial_permutation(scratch, instance.n, instance.i, rng);
    Vector sum = Vector::Zero(instance.d);
    for (int j = 0; j < instance.i; ++j)
        sum += instance.vectors[static_cast<std::size_t>(scratch[static_cast<std::size_t>(j)])];
    // ||prefix average - mean|| > bound, scaled through by i to avoid a divide.
    return (sum - target).squaredNorm() >
           threshold_sq * static_cast<double>(instance.i) * static_cast<double>(instance.i);
}

}  // namespace

double empirical_violation_rate(const HSInstance& instance, long trials, std::uint64_t seed,
                                int threads) {
    if (trials < 1000) throw BadArgs("empirical_violation_rate: trials < 1000");
    const double bound = hs_bound(instance.i, instance.n, instance.big_g, instance.delta);
    const double threshold_sq = bound * bound;
    const Vector target = static_cast<double>(instance.i) * instance.mean;

    std::atomic<long> violations{0};
    // One task per ~4096 trials keeps scheduling overhead low; each trial draws
    // its permutation prefix from its own sub-seed so the partition is
    // irrelevant to the result.
    const long block = 4096;
    const long blocks = (trials + block - 1) / block;
    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
        std::vector<int> scratch;
        long local = 0;
        const long begin = static_cast<long>(blk) * block;
        const long end = std::min(trials, begin + block);
        for (long t = begin; t < end; ++t)
            if (trial_violates(instance, threshold_sq, target, seed, t, scratch)) ++local;
        violations.fetch_add(local, std::memory_order_relaxed);
    }, threads);
    return static_cast<double>(violations.load()) / static_cast<double>(trials);
}

std::vector<std::uint8_t> violation_indicators(const HSInstance& instance, long trials,
                                               std::uint64_t seed) {
    if (trials < 1) throw BadArgs("violation_indicators: trials < 1");
    const double bound = hs_bound(instance.i, instance.n, instance.big_g, instance.delta);
    const double threshold_sq = bound * bound;
    const Vector target = static_cast<double>(instance.i) * instance.mean;
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(trials), 0);
    std::vector<int> scratch;
    for (long t = 0; t < trials; ++t)
        flags[static_cast<std::size_t>(t)] =
            trial_violates(instance, threshold_sq, target, seed, t, scratch) ? 1 : 0;
    return flags;
}

HSInstance adversarial_pm_instance(int n, double big_g, int i, double delta) {
    if (n < 2 || n % 2 != 0) throw BadArgs("adversarial_pm_instance: need even n >= 2");
    std::vector<Vector> vectors;
    vectors.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Vector v(1);
        v(0) = (j < n / 2) ? big_g : -big_g;
        vectors.push_back(v);
    }
    return make_hs_instance(std::move(vectors), i, delta);
}

HSInstance random_ball_instance(int n, int d, double big_g, int i, double delta,
                                std::uint64_t seed) {
    if (n < 2) throw BadCount("random_ball_instance: need n >= 2");
    if (d < 1 || d > kMaxDimension) throw BadDimension("random_ball_instance: bad dimension");
    if (big_g <= 0.0) throw BadArgs("random_ball_instance: need G > 0");
    SplitMix64 rng(seed);
    std::vector<Vector> vectors;
    vectors.reserve(static_cast<std::size_t>(n));
    Vector mean = Vector::Zero(d);
    for (int j = 0; j < n; ++j) {
        // Uniform in the unit ball by rejection from the cube.
        Vector v(d);
        do {
            for (int c = 0; c < d; ++c) v(c) = rng.uniform(-1.0, 1.0);
        } while (v.squaredNorm() > 1.0);
        vectors.push_back(v);
        mean += v;
    }
    mean /= static_cast<double>(n);
    double max_norm = 0.0;
    for (auto& v : vectors) {
        v -= mean;
        max_norm = std::max(max_norm, v.norm());
    }
    if (max_norm <= 0.0) throw BadArgs("random_ball_instance: degenerate draw");
    for (auto& v : vectors) v *= big_g / max_norm;
    return make_hs_instance(std::move(vectors), i, delta);
}

ConcentrationRow concentration_cell(const HSInstance& instance, long trials, std::uint64_t seed,
                                    int threads) {
    ConcentrationRow row;
    row.n = instance.n;
    row.i = instance.i;
    row.delta = instance.delta;
    row.big_g = instance.big_g;
    row.trials = trials;
    row.bound = hs_bound(instance.i, instance.n, instance.big_g, instance.delta);
    row.rate = empirical_violation_rate(instance, trials, seed, threads);
    return row;
}

std::string concentration_rows_to_csv(const std::vector<ConcentrationRow>& rows) {
    CsvWriter csv("n,i,delta,G,trials,rate,bound");
    for (const auto& row : rows) {
        csv.field(row.n)
            .field(row.i)
            .field(row.delta)
            .field(row.big_g)
            .field(row.trials)
            .field(row.rate)
            .field(row.bound);
        csv.end_row();
    }
    return csv.str();
}

}  // namespace shufflelab
