#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shufflelab/types.hpp"

namespace shufflelab {

// Parameters of the decay-plus-noise recursions. The Lemma-1 form uses
// {k0, alpha, beta, big_a, xi0, K}; the epoch variant adds {n, eps, big_a1,
// big_a2}; the extended variant adds {big_a3, gamma}.
struct ChungParams {
    double k0 = 1.0;     // initial index, > 0
    double alpha = 2.0;  // decay exponent, > beta
    double beta = 1.0;   // noise exponent, > 0
    double big_a = 1.0;  // noise amplitude A >= 0
    double xi0 = 1.0;    // initial value >= 0
    long K = 1;          // steps / epochs

    int n = 2;           // epoch length (variant), >= 2
    double eps = 1.0;    // perturbation strength (variant), > 0
    double big_a1 = 0.0; // first-epoch additive term >= 0
    double big_a2 = 0.0; // per-epoch noise amplitude >= 0

    double big_a3 = 0.0; // second noise amplitude (extended) >= 0
    double gamma = 0.5;  // second noise exponent (extended), 0 < gamma < alpha
};

enum class ChungLemma { Lemma1, Variant, Extended };

std::string chung_lemma_name(ChungLemma lemma);

// Key=value rendering of the fields the given lemma uses (semicolon-joined so
// it stays a single CSV field).
std::string chung_params_string(const ChungParams& params, ChungLemma lemma);

struct ChungBound1 {
    double sharp = 0.0;  // exact exponential-sum leading term
    double loose = 0.0;  // power-ratio leading term; sharp <= loose always
};

// Closed-form bounds on xi_K for the one-step recursion
//   xi_{k+1} <= exp(-alpha/(k0+k+1)) xi_k + A/(k0+k+1)^{beta+1}:
//   sharp = exp(-alpha sum_{i=1}^K 1/(k0+i)) xi0
//           + (1/(alpha-beta)) e^{alpha/(k0+1)} A/(k0+K)^beta
//           + e^{alpha/(k0+1)} A/(k0+K)^{beta+1},
//   loose replaces the leading factor by ((k0+1)/(k0+K))^alpha.
ChungBound1 chung_bound_1(const ChungParams& params);

// Runs the same recursion WITH EQUALITY for K steps from xi0; the tightest
// sequence the bounds must dominate. K = 0 returns xi0.
double chung_extremal_1(const ChungParams& params);

// Epoch variant, c := e^{eps pi^2/6}. Bound on xi_K under
//   xi_1     <= exp(-alpha sum_{i=1}^n 1/(k0+i)) xi0 + A1,
//   xi_{k+1} <= exp(-alpha sum_{i=1}^n 1/(k0+nk+i) + eps/k^2) xi_k
//               + A2/(k0+n(k+1))^{beta+1}   (k >= 1):
//   c (k0+1)^alpha xi0/(k0+nK)^alpha + c (k0+n+1)^alpha A1/(k0+nK)^alpha
//   + (c/(alpha-beta)) e^{alpha/(k0+n+1)} A2/(n (k0+nK)^beta)
//   + c e^{alpha/(k0+n+1)} A2/(k0+nK)^{beta+1}.
double chung_bound_2(const ChungParams& params);

// Equality run of the variant recursion; K = 1 uses only the first relation.
double chung_extremal_2(const ChungParams& params);

// Extended variant: the k >= 1 recursion gains A3/(k0+n(k+1))^{gamma+1} and the
// bound gains (c/(alpha-gamma)) e^{alpha/(k0+n+1)} A3/(n (k0+nK)^gamma)
// + c e^{alpha/(k0+n+1)} A3/(k0+nK)^{gamma+1}. Requires gamma < alpha.
double chung_bound_2ext(const ChungParams& params);

double chung_extremal_2ext(const ChungParams& params);

struct ChungRow {
    std::string lemma;
    std::string params;
    double xi_K = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - xi_K
};

// Evaluates extremal and bound for the given lemma and packages the margin.
ChungRow chung_check(const ChungParams& params, ChungLemma lemma);

std::string chung_rows_to_csv(const std::vector<ChungRow>& rows);

struct IntegralCheckReport {
    bool non_decreasing = true;
    double integral = 0.0;  // integral of f over [m, n]
    double sum = 0.0;       // sum of f(i), i = m..n
    double lower = 0.0;     // sandwich lower bound on the sum
    double upper = 0.0;     // sandwich upper bound on the sum
    bool passed = false;
};

// Checks the monotone integral sandwich
//   integral + f(m) <= sum <= integral + f(n)   (non-decreasing f)
// (reversed for non-increasing f) to 1e-10, for integers 1 <= m < n. The
// integral uses the supplied antiderivative, or adaptive quadrature to 1e-12
// when none is given. Monotonicity is read off the integer samples; a
// non-monotone tabulation is rejected.
IntegralCheckReport integral_approx_check(const std::function<double(double)>& f, long m, long n,
                                          std::function<double(double)> antiderivative = {});

}  // namespace shufflelab
