#include "shufflelab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shufflelab/csv.hpp"
#include "shufflelab/rng.hpp"

namespace shufflelab {

namespace {

constexpr int kExhaustiveCap = 8;  // 8! = 40320 permutations stays sub-second

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Visits all n! permutations of {0..n-1} in lexicographic order. The fixed
// visiting order doubles as the fixed reduction order that keeps exhaustive
// results bit-stable no matter how callers parallelize around this.
template <typename Fn>
void for_each_permutation(int n, Fn&& fn) {
    std::vector<int> pi(static_cast<std::size_t>(n));
    std::iota(pi.begin(), pi.end(), 0);
    do {
        fn(const_cast<const std::vector<int>&>(pi));
    } while (std::next_permutation(pi.begin(), pi.end()));
}

std::vector<int> sampled_permutation(int n, std::uint64_t stream_seed) {
    std::vector<int> pi(static_cast<std::size_t>(n));
    std::iota(pi.begin(), pi.end(), 0);
    SplitMix64 rng(stream_seed);
    fisher_yates(pi, rng);
    return pi;
}

void check_eta_grid(const std::vector<double>& eta_grid, double threshold, const char* what) {
    for (double eta : eta_grid) {
        if (eta < 0.0) throw BadArgs(std::string(what) + ": negative eta");
        if (eta > threshold * (1.0 + 1e-12))
            throw BadArgs(std::string(what) + ": eta " + csv_double(eta) +
                          " exceeds the lemma threshold " + csv_double(threshold));
    }
}

}  // namespace

Matrix PermutationEnsemble::mean_matrix() const {
    Matrix mean = Matrix::Zero(d, d);
    for (const auto& Ai : A) mean += Ai;
    return mean / static_cast<double>(n);
}

PermutationEnsemble make_ensemble(std::vector<Matrix> A, std::vector<Vector> b) {
    if (A.size() < 2) throw BadCount("make_ensemble: need n >= 2");
    if (b.size() != A.size()) throw BadArgs("make_ensemble: |A| != |b|");
    PermutationEnsemble ensemble;
    ensemble.n = static_cast<int>(A.size());
    ensemble.d = static_cast<int>(A.front().rows());
    if (ensemble.d < 1 || ensemble.d > kMaxDimension)
        throw BadDimension("make_ensemble: dimension out of range");
    Vector b_sum = Vector::Zero(ensemble.d);
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].rows() != ensemble.d || A[i].cols() != ensemble.d ||
            b[i].size() != ensemble.d)
            throw BadDimension("make_ensemble: inconsistent dimensions");
        if ((A[i] - A[i].transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw BadArgs("make_ensemble: A_i not symmetric");
        b_sum += b[i];
        ensemble.big_g = std::max(ensemble.big_g, b[i].norm());
        ensemble.ell = std::max(ensemble.ell, spectral_norm(A[i]));
    }
    if (b_sum.cwiseAbs().maxCoeff() > 1e-10)
        throw BadArgs("make_ensemble: sum b_i != 0");
    ensemble.A = std::move(A);
    ensemble.b = std::move(b);
    Matrix mean = ensemble.mean_matrix();
    ensemble.mu = min_eigenvalue(mean);
    ensemble.ell = std::max(ensemble.ell, max_eigenvalue(mean));
    if (!(ensemble.mu > 0.0)) throw BadArgs("make_ensemble: mean matrix not positive definite");
    return ensemble;
}

PermutationEnsemble ensemble_from_problem(const QuadraticProblem& problem) {
    std::vector<Matrix> A;
    std::vector<Vector> b;
    A.reserve(problem.components.size());
    b.reserve(problem.components.size());
    for (const auto& comp : problem.components) {
        A.push_back(comp.A);
        b.push_back(comp.b);
    }
    return make_ensemble(std::move(A), std::move(b));
}

Matrix epoch_matrix(const PermutationEnsemble& ensemble, const std::vector<int>& pi, double eta) {
    if (eta < 0.0) throw BadArgs("epoch_matrix: negative eta");
    const Matrix identity = Matrix::Identity(ensemble.d, ensemble.d);
    Matrix product = identity;
    for (int idx : pi)
        product = (identity - eta * ensemble.A[static_cast<std::size_t>(idx)]) * product;
    return product;
}

Vector noise_vector(const PermutationEnsemble& ensemble, const std::vector<int>& pi, double eta) {
    if (eta < 0.0) throw BadArgs("noise_vector: negative eta");
    // v_j = (I - eta A_{pi(j)}) v_{j-1} + b_{pi(j)}
    Vector v = Vector::Zero(ensemble.d);
    for (int idx : pi) {
        const auto i = static_cast<std::size_t>(idx);
        v = v - eta * (ensemble.A[i] * v) + ensemble.b[i];
    }
    return v;
}

std::string target_name(ExpectationTarget target) {
    switch (target) {
        case ExpectationTarget::S: return "S";
        case ExpectationTarget::Gram: return "gram";
        case ExpectationTarget::ShiftedGram: return "shifted_gram";
        case ExpectationTarget::NoiseMean: return "noise_mean";
    }
    return "unknown";
}

namespace {

// Per-permutation contribution of a target (d x d matrix, or d x 1 for the
// noise mean).
Matrix target_sample(const PermutationEnsemble& ensemble, ExpectationTarget target,
                     const std::vector<int>& pi, double eta) {
    switch (target) {
        case ExpectationTarget::S:
            return epoch_matrix(ensemble, pi, eta);
        case ExpectationTarget::Gram:
        case ExpectationTarget::ShiftedGram: {
            Matrix s = epoch_matrix(ensemble, pi, eta);
            return s.transpose() * s;
        }
        case ExpectationTarget::NoiseMean:
            return noise_vector(ensemble, pi, eta);
    }
    throw BadArgs("unknown expectation target");
}

// The ShiftedGram target adds the deterministic eta n A term after averaging.
Matrix target_shift(const PermutationEnsemble& ensemble, ExpectationTarget target, double eta) {
    if (target == ExpectationTarget::ShiftedGram)
        return eta * static_cast<double>(ensemble.n) * ensemble.mean_matrix();
    int cols = target == ExpectationTarget::NoiseMean ? 1 : ensemble.d;
    return Matrix::Zero(ensemble.d, cols);
}

double target_norm(const Matrix& value) { return spectral_norm(value); }

}  // namespace

ExpectationResult expectation(const PermutationEnsemble& ensemble, ExpectationTarget target,
                              double eta, const ExpectationMode& mode) {
    ExpectationResult result;
    result.target = target;
    result.eta = eta;
    result.exhaustive = mode.exhaustive;
    const Matrix shift = target_shift(ensemble, target, eta);

    if (mode.exhaustive) {
        if (ensemble.n > kExhaustiveCap)
            throw TooLarge("expectation: exhaustive mode needs n <= 8");
        const long count = factorial(ensemble.n);
        Matrix sum = Matrix::Zero(shift.rows(), shift.cols());
        for_each_permutation(ensemble.n, [&](const std::vector<int>& pi) {
            sum += target_sample(ensemble, target, pi, eta);
        });
        result.samples = count;
        result.value = sum / static_cast<double>(count) + shift;
        result.norm = target_norm(result.value);
        result.std_error = 0.0;
        return result;
    }

    if (mode.samples < 1000) throw BadArgs("expectation: MonteCarlo needs m >= 1000");
    const long m = mode.samples;
    Matrix sum = Matrix::Zero(shift.rows(), shift.cols());
    for (long j = 0; j < m; ++j) {
        auto pi = sampled_permutation(ensemble.n, sub_seed(mode.seed, static_cast<std::uint64_t>(j)));
        sum += target_sample(ensemble, target, pi, eta);
    }
    result.samples = m;
    result.value = sum / static_cast<double>(m) + shift;
    result.norm = target_norm(result.value);

    // Delete-one jackknife on the norm; samples are regenerated from their
    // sub-seeds instead of stored. The leave-one-out values differ from the
    // full estimate only at the 1/m scale, so the variance is accumulated on
    // deviations from the full norm to avoid catastrophic cancellation.
    double dev_sum = 0.0, dev_sq_sum = 0.0;
    for (long j = 0; j < m; ++j) {
        auto pi = sampled_permutation(ensemble.n, sub_seed(mode.seed, static_cast<std::uint64_t>(j)));
        Matrix leave_out = (sum - target_sample(ensemble, target, pi, eta)) /
                           static_cast<double>(m - 1);
        double dev = target_norm(leave_out + shift) - result.norm;
        dev_sum += dev;
        dev_sq_sum += dev * dev;
    }
    double mean_dev = dev_sum / static_cast<double>(m);
    double var = dev_sq_sum / static_cast<double>(m) - mean_dev * mean_dev;
    if (var < 0.0) var = 0.0;
    result.std_error = std::sqrt(static_cast<double>(m - 1) * var);
    return result;
}

namespace {

ExpectationMode pick_mode(const PermutationEnsemble& ensemble,
                          const std::optional<ExpectationMode>& mode) {
    if (mode) return *mode;
    if (ensemble.n <= kExhaustiveCap) return ExpectationMode::Exhaustive();
    return ExpectationMode::MonteCarlo(100000, 1);
}

VerifyReport contraction_check(const PermutationEnsemble& ensemble,
                               const std::vector<double>& eta_grid,
                               std::optional<ExpectationMode> mode_opt, bool throw_on_violation,
                               const char* lemma, ExpectationTarget target, double eta_threshold,
                               double decay_factor) {
    check_eta_grid(eta_grid, eta_threshold, lemma);
    ExpectationMode mode = pick_mode(ensemble, mode_opt);
    VerifyReport report;
    for (double eta : eta_grid) {
        ExpectationResult ex = expectation(ensemble, target, eta, mode);
        const double rhs =
            1.0 - decay_factor * eta * static_cast<double>(ensemble.n) * ensemble.mu;
        // Monte Carlo estimates get a 5-standard-error allowance.
        const double slack = mode.exhaustive ? 0.0 : 5.0 * ex.std_error;
        VerifyRow row;
        row.lemma = lemma;
        row.n = ensemble.n;
        row.d = ensemble.d;
        row.eta = eta;
        row.lhs = ex.norm;
        row.rhs = rhs;
        row.margin = rhs + slack - ex.norm;
        row.mode = mode.exhaustive ? "exhaustive" : "monte_carlo";
        row.samples = ex.samples;
        row.passed = ex.norm <= rhs + slack + kBoundTol;
        report.add(row);
    }
    if (throw_on_violation) require_pass(report);
    return report;
}

}  // namespace

VerifyReport check_contraction_1(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode, bool throw_on_violation) {
    const double threshold = (3.0 / (16.0 * ensemble.n * ensemble.ell)) *
                             std::min(1.0, std::sqrt(ensemble.n / ensemble.kappa()));
    return contraction_check(ensemble, eta_grid, mode, throw_on_violation, "contraction_1",
                             ExpectationTarget::Gram, threshold, 1.0);
}

VerifyReport check_contraction_2(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode, bool throw_on_violation) {
    const double threshold = (3.0 / (16.0 * ensemble.n * ensemble.ell)) *
                             std::min(1.0, std::sqrt(ensemble.n / ensemble.kappa()));
    return contraction_check(ensemble, eta_grid, mode, throw_on_violation, "contraction_2",
                             ExpectationTarget::S, threshold, 0.5);
}

VerifyReport check_contraction_3(const PermutationEnsemble& ensemble,
                                 const std::vector<double>& eta_grid,
                                 std::optional<ExpectationMode> mode, bool throw_on_violation) {
    const double threshold = (1.0 / (8.0 * ensemble.n * ensemble.ell)) *
                             std::min(1.0, std::sqrt(ensemble.n / ensemble.kappa()));
    return contraction_check(ensemble, eta_grid, mode, throw_on_violation, "contraction_3",
                             ExpectationTarget::ShiftedGram, threshold, 0.5);
}

VerifyReport check_noise_mean(const PermutationEnsemble& ensemble,
                              const std::vector<double>& eta_grid,
                              std::optional<ExpectationMode> mode_opt, bool throw_on_violation) {
    const double threshold = 1.0 / (2.0 * ensemble.n * ensemble.ell);
    check_eta_grid(eta_grid, threshold, "noise_mean");
    ExpectationMode mode = pick_mode(ensemble, mode_opt);
    VerifyReport report;
    for (double eta : eta_grid) {
        ExpectationResult ex = expectation(ensemble, ExpectationTarget::NoiseMean, eta, mode);
        const double rhs =
            4.0 * eta * static_cast<double>(ensemble.n) * ensemble.ell * ensemble.big_g;
        const double slack = mode.exhaustive ? 0.0 : 5.0 * ex.std_error;
        VerifyRow row;
        row.lemma = "noise_mean";
        row.n = ensemble.n;
        row.d = ensemble.d;
        row.eta = eta;
        row.lhs = ex.norm;
        row.rhs = rhs;
        row.margin = rhs + slack - ex.norm;
        row.mode = mode.exhaustive ? "exhaustive" : "monte_carlo";
        row.samples = ex.samples;
        row.passed = ex.norm <= rhs + slack + kBoundTol;
        report.add(row);
    }
    if (throw_on_violation) require_pass(report);
    return report;
}

VerifyReport check_singleshuffle_contraction(const PermutationEnsemble& ensemble,
                                             const std::vector<double>& eta_grid, long samples,
                                             std::uint64_t seed, bool throw_on_violation) {
    const double threshold = 1.0 / (5.0 * ensemble.n * ensemble.ell * ensemble.kappa());
    check_eta_grid(eta_grid, threshold, "singleshuffle_contraction");
    const bool exhaustive = ensemble.n <= kExhaustiveCap;
    VerifyReport report;
    for (double eta : eta_grid) {
        double worst = 0.0;
        long count = 0;
        if (exhaustive) {
            for_each_permutation(ensemble.n, [&](const std::vector<int>& pi) {
                worst = std::max(worst, spectral_norm(epoch_matrix(ensemble, pi, eta)));
            });
            count = factorial(ensemble.n);
        } else {
            for (long j = 0; j < samples; ++j) {
                auto pi = sampled_permutation(ensemble.n,
                                              sub_seed(seed, static_cast<std::uint64_t>(j)));
                worst = std::max(worst, spectral_norm(epoch_matrix(ensemble, pi, eta)));
            }
            count = samples;
        }
        const double rhs = 1.0 - 0.5 * eta * static_cast<double>(ensemble.n) * ensemble.mu;
        VerifyRow row;
        row.lemma = "singleshuffle_contraction";
        row.n = ensemble.n;
        row.d = ensemble.d;
        row.eta = eta;
        row.lhs = worst;
        row.rhs = rhs;
        row.margin = rhs - worst;
        row.mode = exhaustive ? "exhaustive" : "sampled";
        row.samples = count;
        row.passed = worst <= rhs + kBoundTol;
        report.add(row);
    }
    if (throw_on_violation) require_pass(report);
    return report;
}

namespace {

struct EpochStats {
    double mean_sq_dist = 0.0;  // E ||x_end||^2 over permutations
    double std_error = 0.0;     // MC only
    double radius = 0.0;        // max ||x|| over every visited iterate
    long samples = 0;
    bool exhaustive = true;
};

EpochStats epoch_statistics(const QuadraticProblem& problem, const Vector& x_start, double eta,
                            const ExpectationMode& mode) {
    const int n = problem.n();
    auto simulate = [&](const std::vector<int>& pi, double& radius) {
        Vector x = x_start;
        radius = std::max(radius, x.norm());
        for (int idx : pi) {
            const auto& comp = problem.components[static_cast<std::size_t>(idx)];
            x -= eta * (comp.A * x + comp.b);
            radius = std::max(radius, x.norm());
        }
        return x.squaredNorm();
    };

    EpochStats stats;
    if (mode.exhaustive) {
        if (n > kExhaustiveCap)
            throw TooLarge("per-epoch check: exhaustive mode needs n <= 8");
        double sum = 0.0;
        for_each_permutation(n, [&](const std::vector<int>& pi) {
            sum += simulate(pi, stats.radius);
        });
        stats.samples = factorial(n);
        stats.mean_sq_dist = sum / static_cast<double>(stats.samples);
        return stats;
    }

    if (mode.samples < 1000) throw BadArgs("per-epoch check: MonteCarlo needs m >= 1000");
    stats.exhaustive = false;
    stats.samples = mode.samples;
    double sum = 0.0, sq_sum = 0.0;
    for (long j = 0; j < mode.samples; ++j) {
        auto pi = sampled_permutation(n, sub_seed(mode.seed, static_cast<std::uint64_t>(j)));
        double v = simulate(pi, stats.radius);
        sum += v;
        sq_sum += v * v;
    }
    const double m = static_cast<double>(mode.samples);
    stats.mean_sq_dist = sum / m;
    double var = sq_sum / m - stats.mean_sq_dist * stats.mean_sq_dist;
    if (var < 0.0) var = 0.0;
    stats.std_error = std::sqrt(var / m);
    return stats;
}

// Certified gradient bound on the ball of radius `radius` that contains every
// iterate the epoch visited: max_i (||A_i|| radius + ||b_i||).
double region_gradient_bound(const QuadraticProblem& problem, double radius) {
    double bound = 0.0;
    for (const auto& comp : problem.components)
        bound = std::max(bound, spectral_norm(comp.A) * radius + comp.b.norm());
    return bound;
}

void require_convex_components(const QuadraticProblem& problem, const char* what) {
    for (const auto& comp : problem.components)
        if (min_eigenvalue(comp.A) < -1e-9)
            throw AssumptionUnmet(std::string(what) + ": component Hessian has a negative "
                                                      "eigenvalue; convex components required");
    // The inequality is stated around the minimizer at the origin, which needs
    // the linear terms to cancel in the mean.
    if (problem.mean_linear().norm() > 1e-10)
        throw AssumptionUnmet(std::string(what) + ": mean linear term is nonzero, so the "
                                                  "minimizer is not at the origin");
}

}  // namespace

VerifyReport check_per_epoch_progress(const QuadraticProblem& problem, const Vector& x_start,
                                      double eta, std::optional<ExpectationMode> mode_opt,
                                      bool throw_on_violation) {
    require_convex_components(problem, "per_epoch_progress");
    if (eta < 0.0 || eta > 2.0 / problem.ell * (1.0 + 1e-12))
        throw BadArgs("per_epoch_progress: need 0 <= eta <= 2/L");
    ExpectationMode mode = mode_opt ? *mode_opt : ExpectationMode::Exhaustive();
    EpochStats stats = epoch_statistics(problem, x_start, eta, mode);

    const double n = problem.n(), mu = problem.mu, L = problem.ell, kappa = problem.kappa;
    const double G = region_gradient_bound(problem, stats.radius);
    const double dist2 = x_start.squaredNorm();
    const double f0 = problem.objective(x_start);
    const double rhs = (1.0 - 0.75 * n * eta * mu + n * n * eta * eta * L * L) * dist2 -
                       2.0 * n * eta * (1.0 - 4.0 * n * eta * kappa * L) * f0 +
                       20.0 * n * n * eta * eta * eta * kappa * L * G * G +
                       5.0 * n * n * n * eta * eta * eta * eta * L * L * G * G;
    const double slack = stats.exhaustive ? 0.0 : 5.0 * stats.std_error;

    VerifyReport report;
    VerifyRow row;
    row.lemma = "per_epoch_progress";
    row.n = problem.n();
    row.d = problem.d;
    row.eta = eta;
    row.lhs = stats.mean_sq_dist;
    row.rhs = rhs;
    row.margin = rhs + slack - stats.mean_sq_dist;
    row.mode = stats.exhaustive ? "exhaustive" : "monte_carlo";
    row.samples = stats.samples;
    row.passed = stats.mean_sq_dist <= rhs + slack + kBoundTol;
    report.add(row);
    if (throw_on_violation) require_pass(report);
    return report;
}

VerifyReport check_per_epoch_quadratic(const QuadraticProblem& problem, const Vector& x_start,
                                       double eta, std::optional<ExpectationMode> mode_opt,
                                       bool throw_on_violation) {
    require_convex_components(problem, "per_epoch_quadratic");
    if (eta < 0.0 || eta > 2.0 / problem.ell * (1.0 + 1e-12))
        throw BadArgs("per_epoch_quadratic: need 0 <= eta <= 2/L");
    ExpectationMode mode = mode_opt ? *mode_opt : ExpectationMode::Exhaustive();
    EpochStats stats = epoch_statistics(problem, x_start, eta, mode);

    const double n = problem.n(), mu = problem.mu, L = problem.ell, kappa = problem.kappa;
    const double G = region_gradient_bound(problem, stats.radius);
    const double dist2 = x_start.squaredNorm();
    const double e2 = eta * eta, e3 = e2 * eta, e4 = e3 * eta, e5 = e4 * eta;
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n;
    const double rhs = (1.0 - 1.5 * n * eta * mu + 5.0 * n2 * e2 * L * L +
                        8.0 * n3 * e3 * kappa * L * L * L) * dist2 +
                       10.0 * n3 * e4 * L * L * G * G +
                       40.0 * n4 * e5 * kappa * L * L * L * G * G +
                       32.0 * n * e3 * kappa * L * G * G;
    const double slack = stats.exhaustive ? 0.0 : 5.0 * stats.std_error;

    VerifyReport report;
    VerifyRow row;
    row.lemma = "per_epoch_quadratic";
    row.n = problem.n();
    row.d = problem.d;
    row.eta = eta;
    row.lhs = stats.mean_sq_dist;
    row.rhs = rhs;
    row.margin = rhs + slack - stats.mean_sq_dist;
    row.mode = stats.exhaustive ? "exhaustive" : "monte_carlo";
    row.samples = stats.samples;
    row.passed = stats.mean_sq_dist <= rhs + slack + kBoundTol;
    report.add(row);
    if (throw_on_violation) require_pass(report);
    return report;
}

VerifyReport amgm_probe(const PermutationEnsemble& ensemble, const std::vector<double>& eta_grid,
                        long samples, std::uint64_t seed) {
    VerifyReport report;
    for (double eta : eta_grid) {
        if (eta < 0.0) throw BadArgs("amgm_probe: negative eta");
        ExpectationMode mode = ensemble.n <= kExhaustiveCap
                                   ? ExpectationMode::Exhaustive()
                                   : ExpectationMode::MonteCarlo(samples, seed);
        ExpectationResult ex = expectation(ensemble, ExpectationTarget::Gram, eta, mode);
        VerifyRow row;
        row.lemma = "amgm_probe";
        row.n = ensemble.n;
        row.d = ensemble.d;
        row.eta = eta;
        row.lhs = ex.norm;
        row.rhs = 1.0 - eta * static_cast<double>(ensemble.n) * ensemble.mu;
        row.margin = row.rhs - row.lhs;
        row.mode = mode.exhaustive ? "exhaustive" : "monte_carlo";
        row.samples = ex.samples;
        row.passed = true;  // exploratory: never asserts
        report.add(row);
    }
    return report;
}

std::string verify_report_to_csv(const VerifyReport& report) {
    CsvWriter csv("lemma,n,d,eta,lhs,rhs,margin,mode,samples");
    for (const auto& row : report.rows) {
        csv.field(row.lemma)
            .field(row.n)
            .field(row.d)
            .field(row.eta)
            .field(row.lhs)
            .field(row.rhs)
            .field(row.margin)
            .field(row.mode)
            .field(row.samples);
        csv.end_row();
    }
    return csv.str();
}

void require_pass(const VerifyReport& report) {
    for (const auto& row : report.rows)
        if (!row.passed)
            throw BoundViolated(row.lemma + ": bound violated at eta = " + csv_double(row.eta) +
                                " (margin " + csv_double(row.margin) + ")");
}

}  // namespace shufflelab
