#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shufflelab/optimizer.hpp"
#include "shufflelab/problems.hpp"
#include "shufflelab/schedules.hpp"
#include "shufflelab/shuffler.hpp"

namespace shufflelab {

// One sweep definition: the (n, K) grid, the per-point trial count, the
// problem generator, and the method (sampling strategy + schedule + selector).
struct GridSpec {
    std::vector<int> n_values;
    std::vector<int> K_values;
    int trials = 1;

    std::string family = "quadratic";  // "quadratic" | "pl"
    // Quadratic generator knobs.
    int d = 1;
    double mu = 1.0;
    double ell = 2.0;
    double noise_scale = 0.5;
    bool convex_components = false;
    double g_target = 1.0;
    // PL generator knob.
    double perturb_scale = 1.0;

    Strategy strategy = RandomShuffle{};
    ScheduleKind schedule = ScheduleKind::ConstQuadratic;
    double alpha = 3.0;  // varying schedules only
    IterateSelector selector = IterateSelector::Last;

    // true: one problem and one start point per grid point; trials vary only
    // the permutation stream (expectation over permutations for a single F).
    // false: a fresh problem per trial, averaging over the generator's
    // ensemble.
    bool fixed_problem = true;
    double x0_scale = 1.0;  // ||x0||; direction is drawn from the point stream
};

struct RateRow {
    std::string family;
    std::string method;
    std::string schedule;
    std::string selector;
    int n = 0;
    int K = 0;
    int trials = 0;
    double mean = 0.0;       // mean selector suboptimality; +inf flags divergence
    double std_error = 0.0;
    bool requirement_met = false;  // schedule's epoch requirement at (n, K)
    std::uint64_t seed = 0;        // the grid point's sub-seed
};

using RateTable = std::vector<RateRow>;

// Runs trials for every (n, K) point. Deterministic for any thread count:
// points and trials use nested sub-seeds and are aggregated in fixed order.
// A trial that diverges (NonFinite) flags its row with infinite mean instead
// of aborting the sweep.
RateTable sweep(const GridSpec& grid, std::uint64_t base_seed, int threads = 0);

// ||x0|| = scale with a seeded random direction (d >= 2); d = 1 returns the
// scalar `scale`. Shared by sweeps and single runs.
Vector draw_start_point(int d, double scale, std::uint64_t seed);

std::string rate_table_to_csv(const RateTable& table);
RateTable rate_table_from_csv(const std::string& text);

struct RateFit {
    std::string axis;  // "n" | "K"
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

// Ordinary least squares of ln(mean) on ln(axis value) over the rows whose
// other grid variable equals fixed_value. Needs >= 4 points (TooFewPoints),
// finite means (NonFinite), positive means (NonPositiveMean).
RateFit fit_exponent(const RateTable& table, const std::string& axis, int fixed_value);

std::string rate_fits_to_csv(const std::vector<RateFit>& fits);

// One labelled competitor in a method comparison.
struct MethodGrid {
    std::string label;
    GridSpec grid;
};

struct CompareReport {
    RateTable rows;              // |methods| x |grid| rows, method = label
    std::vector<double> ratios;  // aligned with rows: mean / baseline mean at the same (n, K)
    std::vector<std::pair<std::string, RateFit>> fits;  // per-label axis fits where >= 4 points
};

// Sweeps every method over the shared (n, K) grid with the same base seed
// (problems are paired across methods when fixed_problem is set) and reports
// per-point ratios against the first entry.
CompareReport compare_methods(const std::vector<MethodGrid>& methods, std::uint64_t base_seed,
                              int threads = 0);

std::string compare_report_to_csv(const CompareReport& report);

}  // namespace shufflelab
