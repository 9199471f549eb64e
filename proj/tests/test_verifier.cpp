#include <doctest.h>

#include <cmath>
#include <vector>

#include "shufflelab/rng.hpp"
#include "shufflelab/verifier.hpp"

using namespace shufflelab;

namespace {

Matrix scalar(double a) {
    Matrix m(1, 1);
    m(0, 0) = a;
    return m;
}

Vector scalar_vec(double b) {
    Vector v(1);
    v[0] = b;
    return v;
}

// Scalar ensemble {a_i} with zero linear terms.
PermutationEnsemble scalar_ensemble(const std::vector<double>& a) {
    std::vector<Matrix> A;
    std::vector<Vector> b;
    for (double ai : a) {
        A.push_back(scalar(ai));
        b.push_back(scalar_vec(0.0));
    }
    return make_ensemble(std::move(A), std::move(b));
}

PermutationEnsemble random_ensemble(int n, int d, bool convex, std::uint64_t seed,
                                    double g_target = 1.0) {
    return ensemble_from_problem(gen_quadratic(n, d, 1.0, 4.0, 0.8, convex, seed, g_target));
}

std::vector<int> identity_perm(int n) {
    std::vector<int> pi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = i;
    return pi;
}

double contraction1_threshold(const PermutationEnsemble& e) {
    return 3.0 / (16.0 * e.n * e.ell) * std::min(1.0, std::sqrt(e.n / e.kappa()));
}

}  // namespace

TEST_SUITE("verifier") {

TEST_CASE("ensemble constants derive from the data") {
    const PermutationEnsemble e = scalar_ensemble({1.0, 3.0});
    CHECK(e.mu == doctest::Approx(2.0));   // lambda_min of the mean
    CHECK(e.ell == doctest::Approx(3.0));  // max component norm
    CHECK(e.big_g == 0.0);
    CHECK(e.mean_matrix()(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("ensemble validation rejects malformed input") {
    // Mismatched counts.
    CHECK_THROWS_AS(make_ensemble({scalar(1.0), scalar(2.0)},
                                  {scalar_vec(0.0), scalar_vec(0.0), scalar_vec(0.0)}),
                    BadArgs);
    // n < 2.
    CHECK_THROWS_AS(make_ensemble({scalar(1.0)}, {scalar_vec(0.0)}), BadCount);
    // Asymmetric matrix.
    Matrix bad(2, 2);
    bad << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(make_ensemble({bad, bad}, {Vector::Zero(2), Vector::Zero(2)}), BadArgs);
    // Linear terms that do not cancel.
    CHECK_THROWS_AS(make_ensemble({scalar(1.0), scalar(1.0)},
                                  {scalar_vec(1.0), scalar_vec(0.5)}),
                    BadArgs);
    // Mean with a nonpositive eigenvalue.
    CHECK_THROWS_AS(scalar_ensemble({1.0, -1.0}), BadArgs);
}

TEST_CASE("epoch matrix at eta 0 is the identity") {
    const PermutationEnsemble e = random_ensemble(3, 2, false, 1);
    const Matrix S = epoch_matrix(e, identity_perm(3), 0.0);
    CHECK((S - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scalar epoch matrices are permutation-invariant") {
    const PermutationEnsemble e = scalar_ensemble({1.0, 2.0, 3.0});
    const double eta = 0.05;
    const double a = epoch_matrix(e, {0, 1, 2}, eta)(0, 0);
    const double b = epoch_matrix(e, {2, 0, 1}, eta)(0, 0);
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
    CHECK(a == doctest::Approx((1 - eta) * (1 - 2 * eta) * (1 - 3 * eta)).epsilon(1e-15));
}

TEST_CASE("noncommuting factors make the order matter") {
    Matrix A1(2, 2), A2(2, 2);
    A1 << 2.0, 0.0, 0.0, 1.0;
    A2 << 1.5, 0.5, 0.5, 1.5;
    const PermutationEnsemble e =
        make_ensemble({A1, A2}, {Vector::Zero(2), Vector::Zero(2)});
    const double eta = 0.1;
    const Matrix S12 = epoch_matrix(e, {0, 1}, eta);
    const Matrix S21 = epoch_matrix(e, {1, 0}, eta);
    // Direct 2x2 multiplication oracle: later factor multiplies on the left.
    const Matrix F1 = Matrix::Identity(2, 2) - eta * A1;
    const Matrix F2 = Matrix::Identity(2, 2) - eta * A2;
    CHECK((S12 - F2 * F1).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((S21 - F1 * F2).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((S12 - S21).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("noise vector trivial cases and a hand-unrolled value") {
    const PermutationEnsemble zero_b = scalar_ensemble({1.0, 2.0});
    CHECK(noise_vector(zero_b, {0, 1}, 0.2).norm() == 0.0);

    const PermutationEnsemble e =
        make_ensemble({scalar(1.0), scalar(2.0)}, {scalar_vec(0.7), scalar_vec(-0.7)});
    CHECK(noise_vector(e, {0, 1}, 0.0).norm() == 0.0);
    // v after step 1: b_1 = 0.7; after step 2: (1 - 2 eta) 0.7 - 0.7.
    const double eta = 0.1;
    const double expected = (1 - 2 * eta) * 0.7 - 0.7;
    CHECK(noise_vector(e, {0, 1}, eta)(0) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("expectation of S at eta 0 has norm one") {
    const PermutationEnsemble e = random_ensemble(3, 2, true, 2);
    const ExpectationResult r =
        expectation(e, ExpectationTarget::S, 0.0, ExpectationMode::Exhaustive());
    CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.samples == 6);
}

TEST_CASE("scalar Gram expectation matches the frozen product") {
    // a = (1, 3), eta = 1/32: ((1 - eta)(1 - 3 eta))^2, commutative case.
    const PermutationEnsemble e = scalar_ensemble({1.0, 3.0});
    const double eta = 0.03125;
    const ExpectationResult r =
        expectation(e, ExpectationTarget::Gram, eta, ExpectationMode::Exhaustive());
    CHECK(r.norm == doctest::Approx(0.77076053619384765625).epsilon(1e-15));
    CHECK(r.norm <= 1.0 - eta * 2 * e.mu);  // 0.875
}

TEST_CASE("monte carlo expectation agrees with exhaustive within three SEs") {
    // d = 3 gives 2x2 deviation blocks, so the components do not commute and
    // the matrix targets genuinely vary across permutations.
    const PermutationEnsemble e = random_ensemble(4, 3, false, 3);
    for (ExpectationTarget target : {ExpectationTarget::S, ExpectationTarget::Gram,
                                     ExpectationTarget::ShiftedGram, ExpectationTarget::NoiseMean}) {
        const double eta = 0.01;
        const ExpectationResult exact =
            expectation(e, target, eta, ExpectationMode::Exhaustive());
        const ExpectationResult mc =
            expectation(e, target, eta, ExpectationMode::MonteCarlo(100000, 99));
        CHECK(mc.std_error > 0.0);
        CHECK(std::abs(mc.norm - exact.norm) <= 3.0 * mc.std_error + 1e-12);
    }
}

TEST_CASE("jackknife standard error shrinks like the square root of m") {
    const PermutationEnsemble e = random_ensemble(5, 3, false, 4);
    const double eta = 0.01;
    const ExpectationResult small =
        expectation(e, ExpectationTarget::Gram, eta, ExpectationMode::MonteCarlo(2000, 7));
    const ExpectationResult large =
        expectation(e, ExpectationTarget::Gram, eta, ExpectationMode::MonteCarlo(32000, 7));
    const double ratio = small.std_error / large.std_error;  // expect about 4
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("exhaustive expectation refuses n beyond 8") {
    std::vector<Matrix> A(9, scalar(1.0));
    std::vector<Vector> b(9, scalar_vec(0.0));
    const PermutationEnsemble e = make_ensemble(std::move(A), std::move(b));
    CHECK_THROWS_AS(
        expectation(e, ExpectationTarget::S, 0.01, ExpectationMode::Exhaustive()), TooLarge);
    // The MC path still works.
    const ExpectationResult r =
        expectation(e, ExpectationTarget::S, 0.01, ExpectationMode::MonteCarlo(1000, 1));
    CHECK(r.samples == 1000);
}

TEST_CASE("contraction checks hold at eta 0 and at the threshold") {
    for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
        const PermutationEnsemble e = random_ensemble(4, 2, false, seed);
        const double t1 = contraction1_threshold(e);
        const VerifyReport r1 = check_contraction_1(e, {0.0, 0.5 * t1, t1});
        CHECK(r1.passed);
        CHECK(r1.rows.size() == 3);
        CHECK(r1.rows[0].lhs == doctest::Approx(1.0));  // eta = 0 boundary
        CHECK(r1.rows[0].rhs == doctest::Approx(1.0));
        const VerifyReport r2 = check_contraction_2(e, {0.0, t1});
        CHECK(r2.passed);
        const double t3 = 1.0 / (8.0 * e.n * e.ell) * std::min(1.0, std::sqrt(e.n / e.kappa()));
        CHECK(check_contraction_3(e, {0.0, 0.5 * t3, t3}).passed);
    }
}

TEST_CASE("scalar ensembles keep a strict margin at the largest admissible step") {
    for (std::uint64_t seed : {21ULL, 22ULL}) {
        const PermutationEnsemble e =
            ensemble_from_problem(gen_quadratic(4, 1, 1.0, 1.0, 0.5, false, seed));
        const double t1 = contraction1_threshold(e);
        const VerifyReport r = check_contraction_1(e, {t1});
        CHECK(r.passed);
        CHECK(r.rows[0].margin > 0.0);
    }
}

TEST_CASE("nonconvex five-component ensemble passes exhaustively at the threshold") {
    const PermutationEnsemble e = random_ensemble(5, 3, false, 30);
    const double t1 = contraction1_threshold(e);
    const VerifyReport r = check_contraction_1(e, {t1});
    CHECK(r.passed);
    CHECK(r.rows[0].mode == "exhaustive");
    CHECK(r.rows[0].samples == 120);
}

TEST_CASE("noise mean bound: trivial zeros and a random exhaustive ensemble") {
    const PermutationEnsemble zero_b = scalar_ensemble({1.0, 2.0});
    const VerifyReport rz = check_noise_mean(zero_b, {0.0, 0.01});
    CHECK(rz.passed);
    for (const auto& row : rz.rows) CHECK(row.lhs == 0.0);

    const PermutationEnsemble e = random_ensemble(4, 2, false, 31);
    const double tmax = 1.0 / (2.0 * e.n * e.ell);
    const VerifyReport r = check_noise_mean(e, {0.0, 0.5 * tmax, tmax});
    CHECK(r.passed);
    CHECK(r.rows.back().rhs ==
          doctest::Approx(4.0 * tmax * e.n * e.ell * e.big_g).epsilon(1e-12));
}

TEST_CASE("per-permutation contraction holds for every permutation") {
    const PermutationEnsemble e = random_ensemble(4, 2, false, 40);
    const double tmax = 1.0 / (5.0 * e.n * e.ell * e.kappa());
    const VerifyReport r = check_singleshuffle_contraction(e, {0.0, tmax});
    CHECK(r.passed);
    CHECK(r.rows[0].lhs == doctest::Approx(1.0));  // eta = 0
    CHECK(r.rows[0].mode == "exhaustive");

    // Scalar case: the bound is a product of scalars.
    const PermutationEnsemble s = scalar_ensemble({1.0, 2.0});
    const double ts = 1.0 / (5.0 * s.n * s.ell * s.kappa());
    CHECK(check_singleshuffle_contraction(s, {ts}).passed);

    // n = 6 exhaustive (720 permutations).
    const PermutationEnsemble e6 = random_ensemble(6, 2, false, 41);
    const double t6 = 1.0 / (5.0 * e6.n * e6.ell * e6.kappa());
    const VerifyReport r6 = check_singleshuffle_contraction(e6, {t6});
    CHECK(r6.passed);
    CHECK(r6.rows[0].samples == 720);
}

TEST_CASE("eta grids beyond the proven range are rejected") {
    const PermutationEnsemble e = random_ensemble(4, 2, false, 50);
    const double t1 = contraction1_threshold(e);
    CHECK_THROWS_AS(check_contraction_1(e, {2.0 * t1}), BadArgs);
    CHECK_THROWS_AS(check_contraction_1(e, {-0.1}), BadArgs);
}

TEST_CASE("violated bounds throw or get recorded depending on the flag") {
    // A Gram norm above the bound cannot be produced inside the proven eta
    // range, so synthesize a failure by checking the noise bound on an
    // ensemble whose mean linear term is forced to zero but with eta = 0 and a
    // doctored rhs: instead, exercise require_pass on a hand-built report.
    VerifyReport report;
    VerifyRow row;
    row.lemma = "contraction:1";
    row.passed = false;
    report.add(row);
    CHECK_FALSE(report.passed);
    CHECK_THROWS_AS(require_pass(report), BoundViolated);
}

TEST_CASE("per-epoch progress: fixed point and zero-step boundaries") {
    const QuadraticProblem p = gen_quadratic(3, 2, 1.0, 4.0, 0.8, true, 60, /*g_target=*/0.0);
    // x_start = x* = 0 with b_i = 0: both sides are trivially consistent.
    const VerifyReport r0 = check_per_epoch_progress(p, Vector::Zero(2), 0.1);
    CHECK(r0.passed);
    CHECK(r0.rows[0].lhs == 0.0);

    // eta = 0: E ||x_end||^2 = ||x_start||^2 <= rhs.
    const QuadraticProblem q = gen_quadratic(3, 2, 1.0, 4.0, 0.8, true, 61);
    Vector x(2);
    x << 0.8, -0.5;
    const VerifyReport rz = check_per_epoch_progress(q, x, 0.0);
    CHECK(rz.passed);
    CHECK(rz.rows[0].lhs == doctest::Approx(x.squaredNorm()));
}

TEST_CASE("per-epoch progress holds exhaustively on random convex ensembles") {
    SplitMix64 rng(70);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const QuadraticProblem p = gen_quadratic(3, 2, 1.0, 4.0, 0.8, true, seed);
        Vector x(2);
        for (int j = 0; j < 2; ++j) x[j] = rng.uniform(-2.0, 2.0);
        const double eta = rng.uniform(0.01, 2.0 / p.ell);
        CHECK(check_per_epoch_progress(p, x, eta).passed);
        CHECK(check_per_epoch_quadratic(p, x, eta).passed);
    }
}

TEST_CASE("per-epoch checks demand convex components and admissible steps") {
    const QuadraticProblem nonconvex = gen_quadratic(4, 2, 1.0, 10.0, 3.0, false, 1);
    bool has_negative = false;
    for (const auto& c : nonconvex.components)
        has_negative = has_negative || min_eigenvalue(c.A) < -1e-9;
    REQUIRE(has_negative);
    CHECK_THROWS_AS(check_per_epoch_progress(nonconvex, Vector::Zero(2), 0.01), AssumptionUnmet);

    const QuadraticProblem convex = gen_quadratic(3, 2, 1.0, 4.0, 0.8, true, 62);
    CHECK_THROWS_AS(check_per_epoch_progress(convex, Vector::Zero(2), 3.0 / convex.ell), BadArgs);
}

TEST_CASE("amgm probe mirrors the proven check below threshold and never fails") {
    const PermutationEnsemble e = random_ensemble(4, 2, false, 80);
    const double t1 = contraction1_threshold(e);
    const std::vector<double> grid = {0.0, 0.5 * t1, 2.0 * t1, 4.0 * t1};
    const VerifyReport probe = amgm_probe(e, grid);
    CHECK(probe.rows.size() == grid.size());  // one row per grid point
    CHECK(probe.passed);                      // probe rows never fail
    CHECK(probe.rows[0].margin == doctest::Approx(0.0));  // eta = 0

    // Below the threshold the probe margin equals the proven check's margin.
    const VerifyReport proven = check_contraction_1(e, {0.5 * t1});
    CHECK(probe.rows[1].margin == doctest::Approx(proven.rows[0].margin).epsilon(1e-12));
}

TEST_CASE("verify report csv has the pinned schema") {
    const PermutationEnsemble e = random_ensemble(3, 2, false, 90);
    const double t1 = contraction1_threshold(e);
    const VerifyReport r = check_contraction_1(e, {t1});
    const std::string csv = verify_report_to_csv(r);
    CHECK(csv.rfind("lemma,n,d,eta,lhs,rhs,margin,mode,samples\n", 0) == 0);
}

}  // TEST_SUITE
