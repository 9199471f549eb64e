#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shufflelab/problems.hpp"
#include "shufflelab/types.hpp"

namespace shufflelab {

// A fixed quadratic ensemble over which uniform-permutation expectations of the
// epoch matrix S and noise vector t are taken. Constants are derived from the
// data: mu = lambda_min(mean A), L = max(max_i ||A_i||, lambda_max(mean A)),
// G = max_i ||b_i||.
struct PermutationEnsemble {
    std::vector<Matrix> A;
    std::vector<Vector> b;
    int n = 0;
    int d = 0;
    double mu = 0.0;
    double ell = 0.0;
    double big_g = 0.0;

    double kappa() const { return ell / mu; }
    Matrix mean_matrix() const;
};

PermutationEnsemble make_ensemble(std::vector<Matrix> A, std::vector<Vector> b);
PermutationEnsemble ensemble_from_problem(const QuadraticProblem& problem);

// S(pi) = (I - eta A_{pi(n)}) ... (I - eta A_{pi(1)}): later factors on the left.
Matrix epoch_matrix(const PermutationEnsemble& ensemble, const std::vector<int>& pi, double eta);

// t(pi) = sum_j [prod_{t=n}^{j+1} (I - eta A_{pi(t)})] b_{pi(j)}.
Vector noise_vector(const PermutationEnsemble& ensemble, const std::vector<int>& pi, double eta);

enum class ExpectationTarget { S, Gram, ShiftedGram, NoiseMean };

std::string target_name(ExpectationTarget target);

struct ExpectationMode {
    bool exhaustive = true;
    long samples = 0;          // MonteCarlo sample count m >= 1000
    std::uint64_t seed = 0;    // MonteCarlo permutation stream

    static ExpectationMode Exhaustive() { return {true, 0, 0}; }
    static ExpectationMode MonteCarlo(long m, std::uint64_t seed) { return {false, m, seed}; }
};

struct ExpectationResult {
    ExpectationTarget target;
    double eta = 0.0;
    bool exhaustive = true;
    long samples = 0;        // n! when exhaustive
    Matrix value;            // d x 1 for NoiseMean
    double norm = 0.0;       // spectral norm (== euclidean for the vector target)
    double std_error = 0.0;  // delete-one jackknife SE of the norm; MonteCarlo only
};

// Exhaustive mode enumerates all n! permutations in lexicographic order
// (n <= 8, else TooLarge); MonteCarlo draws `samples` uniform permutations from
// per-sample sub-seeded streams.
ExpectationResult expectation(const PermutationEnsemble& ensemble, ExpectationTarget target,
                              double eta, const ExpectationMode& mode);

struct VerifyRow {
    std::string lemma;
    int n = 0;
    int d = 0;
    double eta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs (plus MC slack where applicable)
    std::string mode;
    long samples = 0;
    bool passed = true;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool passed = true;

    void add(VerifyRow row) {
        passed = passed && row.passed;
        rows.push_back(std::move(row));
    }
    void merge(const VerifyReport& other) {
        for (const auto& row : other.rows) add(row);
    }
};

std::string verify_report_to_csv(const VerifyReport& report);

// Absolute tolerance separating genuine violations from rounding noise.
inline constexpr double kBoundTol = 1e-10;

// ||E[S^T S]|| <= 1 - eta n mu for eta <= (3/(16 n L)) min{1, sqrt(n/kappa)}.
VerifyReport check_contraction_1(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode = std::nullopt,
                                 bool throw_on_violation = true);

// ||E[S]|| <= 1 - eta n mu / 2 on the same eta range.
VerifyReport check_contraction_2(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode = std::nullopt,
                                 bool throw_on_violation = true);

// ||E[S^T S] + eta n A|| <= 1 - eta n mu / 2 for eta <= (1/(8 n L)) min{1, sqrt(n/kappa)}.
VerifyReport check_contraction_3(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode = std::nullopt,
                                 bool throw_on_violation = true);

// ||E[t]|| <= 4 eta n L G for eta <= 1/(2 n L).
VerifyReport check_noise_mean(const PermutationEnsemble& ensemble,
                              const std::vector<double>& eta_grid,
                              std::optional<ExpectationMode> mode = std::nullopt,
                              bool throw_on_violation = true);

// Deterministic per-permutation bound ||S(pi)|| <= 1 - eta n mu / 2 for every
// pi, valid for eta <= 1/(5 n L kappa). Exhaustive when n <= 8, else `samples`
// sampled permutations (default 10^4).
VerifyReport check_singleshuffle_contraction(const PermutationEnsemble& ensemble,
                                             const std::vector<double>& eta_grid,
                                             long samples = 10000, std::uint64_t seed = 1,
                                             bool throw_on_violation = true);

// One-epoch progress inequality for convex-component quadratics at step eta
// (<= 2/L): E_pi ||x_end||^2 over permutations from x_start is bounded by
//   (1 - 3 n eta mu / 4 + n^2 eta^2 L^2) ||x_start||^2
//   - 2 n eta (1 - 4 n eta kappa L) (F(x_start) - F*)
//   + 20 n^2 eta^3 kappa L G^2 + 5 n^3 eta^4 L^2 G^2,
// with G a certified gradient bound on the region the epoch visits.
VerifyReport check_per_epoch_progress(const QuadraticProblem& problem, const Vector& x_start,
                                      double eta,
                                      std::optional<ExpectationMode> mode = std::nullopt,
                                      bool throw_on_violation = true);

// Quadratic-cost refinement of the same one-epoch progress statement:
//   (1 - 3 n eta mu / 2 + 5 n^2 eta^2 L^2 + 8 n^3 eta^3 kappa L^3) ||x_start||^2
//   + 10 n^3 eta^4 L^2 G^2 + 40 n^4 eta^5 kappa L^3 G^2 + 32 n eta^3 kappa L G^2.
VerifyReport check_per_epoch_quadratic(const QuadraticProblem& problem, const Vector& x_start,
                                       double eta,
                                       std::optional<ExpectationMode> mode = std::nullopt,
                                       bool throw_on_violation = true);

// Exploratory probe of ||E[S^T S]|| - (1 - eta n mu) for eta beyond the proven
// range; never asserts (the validity range past small eta is an open question).
VerifyReport amgm_probe(const PermutationEnsemble& ensemble, const std::vector<double>& eta_grid,
                        long samples = 10000, std::uint64_t seed = 1);

// Throws BoundViolated naming the first failing row.
void require_pass(const VerifyReport& report);

}  // namespace shufflelab
