#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shufflelab/types.hpp"

namespace shufflelab {

// Vector Hoeffding-Serfling deviation bound for without-replacement prefix
// averages: with probability at least 1 - delta over a uniform permutation
// sigma of n vectors with ||v_j|| <= G,
//   ||(1/i) sum_{j<=i} v_{sigma(j)} - mean|| <= G sqrt(8 (1 - (i-1)/n) ln(2/delta) / i).
double hs_bound(int i, int n, double big_g, double delta);

// A fixed vector family plus the (prefix length, failure probability) cell the
// bound is evaluated at. Derived fields are filled by make_hs_instance.
struct HSInstance {
    std::vector<Vector> vectors;
    int i = 0;
    double delta = 0.0;

    int n = 0;
    int d = 0;
    double big_g = 0.0;  // max_j ||v_j||
    Vector mean;
};

HSInstance make_hs_instance(std::vector<Vector> vectors, int i, double delta);

// Fraction of `trials` uniform permutations whose length-i prefix average
// deviates from the mean by more than hs_bound. Deterministic for any worker
// pool size: trials use per-trial sub-seeds and integer counts are summed.
double empirical_violation_rate(const HSInstance& instance, long trials, std::uint64_t seed,
                                int threads = 0);

// Per-trial violation indicators for the same permutation stream (1 = the
// prefix average broke the bound). Exposed so scale-invariance of the
// indicator itself is checkable, not just the aggregate rate.
std::vector<std::uint8_t> violation_indicators(const HSInstance& instance, long trials,
                                               std::uint64_t seed);

// Worst-case scalar family: half the vectors at +G, half at -G (n even).
HSInstance adversarial_pm_instance(int n, double big_g, int i, double delta);

// Random family: n vectors drawn uniformly from the radius-G ball in R^d,
// recentred to zero mean and rescaled so the max norm is exactly G.
HSInstance random_ball_instance(int n, int d, double big_g, int i, double delta,
                                std::uint64_t seed);

struct ConcentrationRow {
    int n = 0;
    int i = 0;
    double delta = 0.0;
    double big_g = 0.0;
    long trials = 0;
    double rate = 0.0;
    double bound = 0.0;
};

ConcentrationRow concentration_cell(const HSInstance& instance, long trials, std::uint64_t seed,
                                    int threads = 0);

std::string concentration_rows_to_csv(const std::vector<ConcentrationRow>& rows);

}  // namespace shufflelab
