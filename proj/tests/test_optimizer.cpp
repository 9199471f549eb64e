#include <doctest.h>

#include <cmath>
#include <string>

#include "shufflelab/optimizer.hpp"
#include "shufflelab/rng.hpp"

using namespace shufflelab;

TEST_SUITE("optimizer") {

TEST_CASE("origin is a fixed point when all linear terms vanish") {
    const ProblemHandle q(gen_quadratic(3, 2, 1.0, 4.0, 1.0, true, 5, /*g_target=*/0.0));
    const Schedule s = const_quadratic(q.mu(), q.ell(), 3, 10);
    const Trajectory t = run(q, RandomShuffle{}, s, 10, Vector::Zero(2), 123);
    REQUIRE(t.subopt.size() == 11);
    for (double v : t.subopt) CHECK(v == 0.0);
    for (double v : t.dist2) CHECK(v == 0.0);
    CHECK(t.max_iterate_norm == 0.0);
}

TEST_CASE("two-step epoch matches the hand-unrolled affine map") {
    const QuadraticProblem p = gen_quadratic(2, 1, 1.0, 1.0, 0.0, true, 7);
    const ProblemHandle q(p);
    const Schedule s = const_quadratic(1.0, 1.0, 2, 1);
    const double eta = s.eta(1, 1);
    Vector x0(1);
    x0 << 1.3;
    const Trajectory t = run(q, FixedPermutation{{0, 1}}, s, 1, x0, 9);
    const double a1 = p.components[0].A(0, 0), b1 = p.components[0].b(0);
    const double a2 = p.components[1].A(0, 0), b2 = p.components[1].b(0);
    const double expected = (1 - eta * a2) * ((1 - eta * a1) * x0[0] - eta * b1) - eta * b2;
    CHECK(t.iterates.back()(0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("doubling the admissible epoch budget lowers the mean error") {
    const int n = 8, K = 192;
    const QuadraticProblem p = gen_quadratic(n, 2, 1.0, 2.0, 0.8, false, 33);
    const ProblemHandle q(p);
    REQUIRE(const_quadratic(q.mu(), q.ell(), n, K).requirement(n, K));
    Vector x0(2);
    x0 << 1.0, -1.0;
    double mean_half = 0.0, mean_full = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Schedule s_half = const_quadratic(q.mu(), q.ell(), n, K / 2);
        const Schedule s_full = const_quadratic(q.mu(), q.ell(), n, K);
        mean_half += run(q, RandomShuffle{}, s_half, K / 2, x0, sub_seed(1, seed)).subopt.back();
        mean_full += run(q, RandomShuffle{}, s_full, K, x0, sub_seed(1, seed)).subopt.back();
    }
    CHECK(mean_full / 50 < mean_half / 50);
}

TEST_CASE("selectors coincide on a constant trajectory") {
    const ProblemHandle q(gen_quadratic(2, 2, 1.0, 3.0, 0.5, true, 2, 0.0));
    const Schedule s = const_quadratic(q.mu(), q.ell(), 2, 6);
    const Trajectory t = run(q, RandomShuffle{}, s, 6, Vector::Zero(2), 3);
    const double last = select(t, IterateSelector::Last, q).value;
    const double best = select(t, IterateSelector::BestEndOfEpoch, q).value;
    const double tail = select(t, IterateSelector::TailAverage, q).value;
    CHECK(last == best);
    CHECK(last == tail);
    CHECK(last == 0.0);
}

TEST_CASE("tail average over a single epoch is the starting point") {
    const ProblemHandle q(gen_quadratic(2, 2, 1.0, 3.0, 0.5, true, 4));
    const Schedule s = const_quadratic(q.mu(), q.ell(), 2, 1);
    Vector x0(2);
    x0 << 0.4, 0.9;
    const Trajectory t = run(q, RandomShuffle{}, s, 1, x0, 17);
    const Selection tail = select(t, IterateSelector::TailAverage, q);
    CHECK((tail.iterate - x0).norm() == doctest::Approx(0.0));
}

TEST_CASE("best end-of-epoch never loses to the last iterate") {
    SplitMix64 rng(88);
    for (int rep = 0; rep < 20; ++rep) {
        const ProblemHandle q(
            gen_quadratic(4, 3, 1.0, 5.0, 1.0, false, sub_seed(6, static_cast<std::uint64_t>(rep))));
        const Schedule s = const_quadratic(q.mu(), q.ell(), 4, 12);
        Vector x0(3);
        for (int j = 0; j < 3; ++j) x0[j] = rng.uniform(-2.0, 2.0);
        const Trajectory t = run(q, RandomShuffle{}, s, 12, x0, sub_seed(7, rep));
        CHECK(select(t, IterateSelector::BestEndOfEpoch, q).value <=
              select(t, IterateSelector::Last, q).value);
        // Best matches a scan over the recorded subopt values.
        double scan = t.subopt[0];
        for (double v : t.subopt) scan = std::min(scan, v);
        CHECK(select(t, IterateSelector::BestEndOfEpoch, q).value == doctest::Approx(scan));
    }
}

TEST_CASE("runaway step sizes raise DivergedRun with a flagged partial trajectory") {
    // mu = 1e-6 makes the tail schedule's step about 1e6 times too large.
    const ProblemHandle q(gen_quadratic(2, 2, 1e-6, 1.0, 0.5, false, 12));
    const Schedule s = const_tail(q.mu(), q.ell(), 2, 40);
    Vector x0(2);
    x0 << 1.0, 1.0;
    CHECK_THROWS_AS(run(q, RandomShuffle{}, s, 40, x0, 5), DivergedRun);
    try {
        run(q, RandomShuffle{}, s, 40, x0, 5);
    } catch (const DivergedRun& d) {
        REQUIRE(!d.partial.subopt.empty());
        CHECK(std::isinf(d.partial.subopt.back()));
        CHECK(std::isinf(d.partial.dist2.back()));
        CHECK(std::isinf(d.partial.max_iterate_norm));
    }
}

TEST_CASE("argument validation") {
    const ProblemHandle q(gen_quadratic(3, 2, 1.0, 2.0, 0.5, true, 1));
    const Schedule wrong_n = const_quadratic(1.0, 2.0, 4, 10);
    CHECK_THROWS_AS(run(q, RandomShuffle{}, wrong_n, 10, Vector::Zero(2), 1), BadArgs);
    const Schedule s = const_quadratic(1.0, 2.0, 3, 10);
    CHECK_THROWS_AS(run(q, RandomShuffle{}, s, 0, Vector::Zero(2), 1), BadCount);
    CHECK_THROWS_AS(run(q, RandomShuffle{}, s, 10, Vector::Zero(3), 1), BadDimension);
}

TEST_CASE("trajectory csv carries the metadata block and one row per epoch") {
    const ProblemHandle q(gen_quadratic(2, 2, 1.0, 2.0, 0.5, true, 10));
    const Schedule s = const_quadratic(q.mu(), q.ell(), 2, 3);
    Vector x0(2);
    x0 << 1.0, 0.0;
    const Trajectory t = run(q, SingleShuffle{}, s, 3, x0, 77);
    const std::string csv = trajectory_to_csv(t, problem_hash(q));
    CHECK(csv.find("# problem_hash=") != std::string::npos);
    CHECK(csv.find("# strategy=single_shuffle") != std::string::npos);
    CHECK(csv.find("# schedule=const_quadratic") != std::string::npos);
    CHECK(csv.find("epoch,subopt,dist2\n") != std::string::npos);
    // 4 end-of-epoch rows: x_0^1 .. x_0^4.
    int rows = 0;
    for (std::size_t pos = csv.find("epoch,subopt,dist2\n") + 19; pos < csv.size(); ++pos)
        rows += csv[pos] == '\n';
    CHECK(rows == 4);
}

TEST_CASE("single shuffle trajectories are permutation-stationary") {
    // Same seed: the K-epoch single-shuffle trajectory equals a fixed
    // permutation run with that first block.
    const ProblemHandle q(gen_quadratic(4, 2, 1.0, 3.0, 0.7, false, 8));
    const Schedule s = const_singleshuffle(q.mu(), q.ell(), 4, 5);
    Vector x0(2);
    x0 << -0.3, 1.1;
    const std::uint64_t seed = 99;
    const Trajectory a = run(q, SingleShuffle{}, s, 5, x0, seed);
    const auto block = epoch_indices(SingleShuffle{}, 4, 3, seed);  // any k: same block
    const Trajectory b = run(q, FixedPermutation{block}, s, 5, x0, seed);
    for (std::size_t k = 0; k < a.subopt.size(); ++k)
        CHECK(a.subopt[k] == doctest::Approx(b.subopt[k]).epsilon(1e-15));
}

}  // TEST_SUITE
