#pragma once

#include <string>

#include "shufflelab/types.hpp"

namespace shufflelab {

enum class ScheduleKind {
    ConstPL,
    ConstQuadratic,
    ConstTail,
    ConstSingleShuffle,
    VaryingStronglyConvex,
    VaryingQuadratic,
    SgdBaseline,
};

std::string schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(const std::string& name);

// Step-size rule eta(k, i) for epoch k in [1..K], within-epoch index i in
// [1..n], plus the matching epoch-count requirement. All logarithms natural.
// Requirements are advisory: they are reported, never enforced.
struct Schedule {
    ScheduleKind kind;
    double mu = 0.0;
    double ell = 0.0;
    double kappa = 1.0;
    int n = 0;
    int K = 0;
    double alpha = 0.0;  // varying schedules only
    double k0 = 0.0;     // alpha * kappa

    double eta(int k, int i) const;
    bool requirement(int n_value, int K_value) const;
    std::string name() const { return schedule_kind_name(kind); }
};

// eta = 2 ln(sqrt(n) K) / (mu n K); requires K >= 10 kappa ln(sqrt(n) K).
Schedule const_pl(double mu, double ell, int n, int K);
// eta = 2 ln(nK) / (mu n K); requires K >= (32/3) kappa max{1, sqrt(kappa/n)} ln(nK).
Schedule const_quadratic(double mu, double ell, int n, int K);
// eta = 16 ln(nK) / (mu n K); requires K >= 128 kappa max{1, sqrt(kappa/n)} ln(nK).
Schedule const_tail(double mu, double ell, int n, int K);
// eta = 2 ln(sqrt(n) K) / (mu n K); requires K >= 10 kappa^2 ln(sqrt(n) K).
Schedule const_singleshuffle(double mu, double ell, int n, int K);
// k0 = alpha kappa; epoch 1: (2 alpha / mu)/(k0 + i); epochs k >= 2:
// (2 alpha / mu)/(k0 + n k). Needs alpha > 2.
Schedule varying_strongly_convex(double mu, double ell, int n, double alpha);
// Same rule, needs alpha > 4 (quadratic analysis).
Schedule varying_quadratic(double mu, double ell, int n, double alpha);
// Robbins-Monro baseline for with-replacement SGD: at global iteration
// t = n(k-1)+i, eta = 2/(mu (t + 4 kappa)); the offset keeps eta <= 1/(2L).
Schedule sgd_baseline(double mu, double ell, int n, int K);

Schedule make_schedule(ScheduleKind kind, double mu, double ell, int n, int K, double alpha);

}  // namespace shufflelab
