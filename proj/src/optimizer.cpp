#include "shufflelab/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "shufflelab/csv.hpp"

namespace shufflelab {

std::string selector_name(IterateSelector selector) {
    switch (selector) {
        case IterateSelector::Last: return "last";
        case IterateSelector::BestEndOfEpoch: return "best_end_of_epoch";
        case IterateSelector::TailAverage: return "tail_average";
    }
    return "unknown";
}

IterateSelector selector_from_name(const std::string& name) {
    if (name == "last") return IterateSelector::Last;
    if (name == "best_end_of_epoch") return IterateSelector::BestEndOfEpoch;
    if (name == "tail_average") return IterateSelector::TailAverage;
    throw BadArgs("unknown selector: " + name);
}

Trajectory run(const ProblemHandle& problem, const Strategy& strategy,
               const Schedule& schedule, int K, const Vector& x0, std::uint64_t seed) {
    const int n = problem.n();
    if (schedule.n != n) throw BadArgs("run: schedule and problem disagree on n");
    if (K < 1) throw BadCount("run: need K >= 1");
    if (x0.size() != problem.dimension()) throw BadDimension("run: x0 has wrong dimension");

    Trajectory trajectory;
    trajectory.seed = seed;
    trajectory.n = n;
    trajectory.K = K;
    trajectory.strategy = strategy_name(strategy);
    trajectory.schedule = schedule.name();
    trajectory.iterates.reserve(static_cast<std::size_t>(K) + 1);
    trajectory.subopt.reserve(static_cast<std::size_t>(K) + 1);
    trajectory.dist2.reserve(static_cast<std::size_t>(K) + 1);

    Vector x = x0;
    auto snapshot = [&] {
        trajectory.iterates.push_back(x);
        trajectory.subopt.push_back(problem.objective(x) - problem.optimum_value());
        double dist = problem.distance_to_solution_set(x);
        trajectory.dist2.push_back(dist * dist);
    };
    trajectory.max_iterate_norm = x.norm();
    snapshot();  // x_0^1 = x0

    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= K; ++k) {
        const std::vector<int> block = epoch_indices(strategy, n, k, seed);
        for (int i = 1; i <= n; ++i) {
            const double eta = schedule.eta(k, i);
            x -= eta * problem.component_gradient(block[static_cast<std::size_t>(i - 1)], x);
            if (!x.allFinite()) {
                trajectory.iterates.push_back(x);
                trajectory.subopt.push_back(kInf);
                trajectory.dist2.push_back(kInf);
                trajectory.max_iterate_norm = kInf;
                throw DivergedRun("run: iterate diverged at epoch " + std::to_string(k) +
                                      ", step " + std::to_string(i),
                                  std::move(trajectory));
            }
            trajectory.max_iterate_norm = std::max(trajectory.max_iterate_norm, x.norm());
        }
        snapshot();  // x_0^{k+1} := x_n^k
    }
    return trajectory;
}

Selection select(const Trajectory& trajectory, IterateSelector selector,
                 const ProblemHandle& problem) {
    if (trajectory.iterates.empty()) throw BadArgs("select: empty trajectory");
    const int K = trajectory.K;
    switch (selector) {
        case IterateSelector::Last: {
            const Vector& x = trajectory.iterates.back();
            return {x, problem.objective(x) - problem.optimum_value()};
        }
        case IterateSelector::BestEndOfEpoch: {
            std::size_t best = 0;
            for (std::size_t k = 1; k < trajectory.subopt.size(); ++k)
                if (trajectory.subopt[k] < trajectory.subopt[best]) best = k;  // ties: earliest
            return {trajectory.iterates[best], trajectory.subopt[best]};
        }
        case IterateSelector::TailAverage: {
            // Mean of x_0^k for k in [ceil(K/2), K]; iterates[j] holds x_0^{j+1}.
            const int first = (K + 1) / 2;
            Vector mean = Vector::Zero(trajectory.iterates.front().size());
            for (int k = first; k <= K; ++k)
                mean += trajectory.iterates[static_cast<std::size_t>(k - 1)];
            mean /= static_cast<double>(K - first + 1);
            return {mean, problem.objective(mean) - problem.optimum_value()};
        }
    }
    throw BadArgs("select: unknown selector");
}

std::string trajectory_to_csv(const Trajectory& trajectory, const std::string& problem_hash) {
    std::string out;
    out += "# problem_hash=" + problem_hash + "\n";
    out += "# schedule=" + trajectory.schedule + "\n";
    out += "# strategy=" + trajectory.strategy + "\n";
    out += "# seed=" + std::to_string(trajectory.seed) + "\n";
    out += "# n=" + std::to_string(trajectory.n) + "\n";
    out += "# K=" + std::to_string(trajectory.K) + "\n";
    out += "# max_iterate_norm=" + csv_double(trajectory.max_iterate_norm) + "\n";
    out += "epoch,subopt,dist2\n";
    for (std::size_t k = 0; k < trajectory.subopt.size(); ++k)
        out += std::to_string(k + 1) + "," + csv_double(trajectory.subopt[k]) + "," +
               csv_double(trajectory.dist2[k]) + "\n";
    return out;
}

}  // namespace shufflelab
