#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shufflelab/chung.hpp"
#include "shufflelab/concentration.hpp"
#include "shufflelab/verifier.hpp"

namespace shufflelab {

// Parameterized verification suites. cmd_verify drives them from config files;
// the acceptance gate drives them at its pinned sizes. Every suite is
// deterministic in (params, seed) for any thread count.

struct ContractionSuiteParams {
    int ensembles = 50;
    int n_min = 2, n_max = 6;   // exhaustive permutation range
    int d_min = 1, d_max = 4;
    int eta_points = 4;         // grid resolution per lemma, up to its threshold
    bool include_nonconvex = true;
    double mu = 1.0;
    double ell = 4.0;
    double noise_scale = 0.8;
    double g_target = 1.0;
    std::uint64_t seed = 1;
    int threads = 0;
};

// Checks all five permutation-expectation bounds on `ensembles` generated
// ensembles cycling through the (n, d) x {convex, nonconvex} grid.
VerifyReport contraction_suite(const ContractionSuiteParams& params);

// Probe mode: evaluates the Gram expectation at eta beyond the proven
// threshold (multiples {2, 4, 8}); rows never fail.
VerifyReport contraction_probe_suite(const ContractionSuiteParams& params);

struct ProgressSuiteParams {
    int ensembles = 20;
    int starts = 5;
    int eta_points = 3;  // eta = (2/L) j/eta_points, j = 1..eta_points
    int n_min = 2, n_max = 6;
    int d_min = 1, d_max = 4;
    double mu = 1.0;
    double ell = 4.0;
    double noise_scale = 0.8;
    double g_target = 1.0;
    double x0_scale = 2.0;
    std::uint64_t seed = 2;
    int threads = 0;
};

// Exhaustive one-epoch progress inequalities (both forms) on convex-component
// quadratics, over random start points and the (0, 2/L] step grid.
VerifyReport progress_suite(const ProgressSuiteParams& params);

struct ConcentrationSuiteParams {
    std::vector<int> n_values{10, 50, 200};
    std::vector<double> deltas{0.2, 0.05, 0.01};
    long trials = 100000;
    int d = 3;          // random-family dimension
    double big_g = 1.0;
    std::uint64_t seed = 3;
    int threads = 0;
};

// Prefix lengths i in {n/4, n/2, 3n/4} per n, adversarial and random families.
std::vector<ConcentrationRow> concentration_suite(const ConcentrationSuiteParams& params);

// Binomial 3-sigma acceptance slack for an empirical rate at the given cell.
double concentration_slack(double delta, long trials);
bool concentration_row_passed(const ConcentrationRow& row);

struct ChungSuiteParams {
    int tuples = 500;       // per lemma
    int integral_pairs = 100;  // per closed-form family
    std::uint64_t seed = 4;
    int threads = 0;
};

// Random parameter tuples for all three lemmas; margins must be >= -1e-12.
std::vector<ChungRow> chung_suite(const ChungSuiteParams& params);
bool chung_rows_passed(const std::vector<ChungRow>& rows);

// Integral sandwich checks on the two closed-form families (1/(k0+x) and
// (k0+x)^p, p > -1), reported in the chung CSV shape (lemma =
// "integral_sandwich", xi_K = sum, bound = upper sandwich, margin = the worse
// side of the sandwich).
std::vector<ChungRow> chung_integral_suite(const ChungSuiteParams& params);
bool integral_rows_passed(const std::vector<ChungRow>& rows);  // margins >= -1e-10

}  // namespace shufflelab
