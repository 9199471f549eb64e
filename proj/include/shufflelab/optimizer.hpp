#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shufflelab/problems.hpp"
#include "shufflelab/schedules.hpp"
#include "shufflelab/shuffler.hpp"
#include "shufflelab/types.hpp"

namespace shufflelab {

// End-of-epoch record of one run: iterates x_0^1 .. x_0^{K+1} (K+1 vectors;
// per-iteration state is recomputable, and every downstream consumer --
// selectors, sweeps, bound checks -- works at epoch granularity).
struct Trajectory {
    std::vector<Vector> iterates;
    std::vector<double> subopt;  // F(x_0^k) - F*
    std::vector<double> dist2;   // squared distance to the solution set
    double max_iterate_norm = 0.0;  // over all within-epoch iterates (bounded-iterates bookkeeping)
    std::uint64_t seed = 0;
    int n = 0;
    int K = 0;
    std::string strategy;
    std::string schedule;

    int epochs() const { return K; }
};

enum class IterateSelector { Last, BestEndOfEpoch, TailAverage };

std::string selector_name(IterateSelector selector);
IterateSelector selector_from_name(const std::string& name);

struct Selection {
    Vector iterate;
    double value;  // F(iterate) - F*
};

// NonFinite carrying everything recorded before the blow-up, closed by one
// flagged snapshot with infinite metrics, so callers can still persist the
// partial trajectory.
struct DivergedRun : NonFinite {
    Trajectory partial;
    DivergedRun(const std::string& message, Trajectory partial_trajectory)
        : NonFinite(message), partial(std::move(partial_trajectory)) {}
};

// Runs x_i^k <- x_{i-1}^k - eta(k,i) grad f_{sigma_k(i)}(x_{i-1}^k) for K epochs
// from x0, with x_0^{k+1} := x_n^k. Throws DivergedRun (a NonFinite) if any
// coordinate leaves the finite range (divergent step size).
Trajectory run(const ProblemHandle& problem, const Strategy& strategy,
               const Schedule& schedule, int K, const Vector& x0, std::uint64_t seed);

// Last: x_0^{K+1}. BestEndOfEpoch: argmin_k F(x_0^k) over k in [K+1], ties to
// the smallest k. TailAverage: mean of x_0^{ceil(K/2)} .. x_0^{K} inclusive.
Selection select(const Trajectory& trajectory, IterateSelector selector,
                 const ProblemHandle& problem);

// Trajectory CSV: '#'-prefixed metadata header block, then epoch,subopt,dist2.
std::string trajectory_to_csv(const Trajectory& trajectory, const std::string& problem_hash);

}  // namespace shufflelab
