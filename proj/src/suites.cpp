#include "shufflelab/suites.hpp"

#include <algorithm>
#include <cmath>

#include "shufflelab/parallel.hpp"
#include "shufflelab/rates.hpp"
#include "shufflelab/rng.hpp"

namespace shufflelab {

namespace {

std::vector<double> eta_grid_to(double threshold, int points) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int j = 1; j <= points; ++j)
        grid.push_back(threshold * static_cast<double>(j) / static_cast<double>(points));
    return grid;
}

// Deterministic (n, d, convexity) assignment for ensemble index e: cycles
// dimensions fastest, then n, alternating convexity when both are requested.
struct EnsembleShape {
    int n;
    int d;
    bool convex;
};

EnsembleShape shape_for(int e, int n_min, int n_max, int d_min, int d_max,
                        bool include_nonconvex) {
    const int n_span = n_max - n_min + 1;
    const int d_span = d_max - d_min + 1;
    EnsembleShape shape;
    shape.d = d_min + e % d_span;
    shape.n = n_min + (e / d_span) % n_span;
    shape.convex = include_nonconvex ? (e % 2 == 0) : true;
    return shape;
}

}  // namespace

VerifyReport contraction_suite(const ContractionSuiteParams& params) {
    if (params.ensembles < 1) throw BadArgs("contraction_suite: ensembles < 1");
    if (params.n_min < 2 || params.n_max > 8 || params.n_min > params.n_max)
        throw BadArgs("contraction_suite: exhaustive mode needs 2 <= n_min <= n_max <= 8");
    if (params.eta_points < 1) throw BadArgs("contraction_suite: eta_points < 1");

    std::vector<VerifyReport> slots(static_cast<std::size_t>(params.ensembles));
    parallel_for(slots.size(), [&](std::size_t e) {
        const EnsembleShape shape =
            shape_for(static_cast<int>(e), params.n_min, params.n_max, params.d_min,
                      params.d_max, params.include_nonconvex);
        QuadraticProblem problem =
            gen_quadratic(shape.n, shape.d, params.mu, params.ell, params.noise_scale,
                          shape.convex, sub_seed(params.seed, e), params.g_target);
        PermutationEnsemble ensemble = ensemble_from_problem(problem);

        const double root = std::min(1.0, std::sqrt(ensemble.n / ensemble.kappa()));
        const double nl = static_cast<double>(ensemble.n) * ensemble.ell;
        VerifyReport report;
        report.merge(check_contraction_1(
            ensemble, eta_grid_to(3.0 / (16.0 * nl) * root, params.eta_points), std::nullopt,
            false));
        report.merge(check_contraction_2(
            ensemble, eta_grid_to(3.0 / (16.0 * nl) * root, params.eta_points), std::nullopt,
            false));
        report.merge(check_contraction_3(
            ensemble, eta_grid_to(1.0 / (8.0 * nl) * root, params.eta_points), std::nullopt,
            false));
        report.merge(check_noise_mean(ensemble, eta_grid_to(1.0 / (2.0 * nl), params.eta_points),
                                      std::nullopt, false));
        report.merge(check_singleshuffle_contraction(
            ensemble, eta_grid_to(1.0 / (5.0 * nl * ensemble.kappa()), params.eta_points), 10000,
            sub_seed(params.seed, e) ^ 0x5353u, false));
        slots[e] = std::move(report);
    }, params.threads);

    VerifyReport merged;
    for (const auto& slot : slots) merged.merge(slot);
    return merged;
}

VerifyReport contraction_probe_suite(const ContractionSuiteParams& params) {
    if (params.ensembles < 1) throw BadArgs("contraction_probe_suite: ensembles < 1");
    std::vector<VerifyReport> slots(static_cast<std::size_t>(params.ensembles));
    parallel_for(slots.size(), [&](std::size_t e) {
        const EnsembleShape shape =
            shape_for(static_cast<int>(e), params.n_min, params.n_max, params.d_min,
                      params.d_max, params.include_nonconvex);
        QuadraticProblem problem =
            gen_quadratic(shape.n, shape.d, params.mu, params.ell, params.noise_scale,
                          shape.convex, sub_seed(params.seed, e), params.g_target);
        PermutationEnsemble ensemble = ensemble_from_problem(problem);
        const double threshold = 3.0 / (16.0 * ensemble.n * ensemble.ell) *
                                 std::min(1.0, std::sqrt(ensemble.n / ensemble.kappa()));
        slots[e] = amgm_probe(ensemble, {2.0 * threshold, 4.0 * threshold, 8.0 * threshold});
    }, params.threads);

    VerifyReport merged;
    for (const auto& slot : slots) merged.merge(slot);
    return merged;
}

VerifyReport progress_suite(const ProgressSuiteParams& params) {
    if (params.ensembles < 1 || params.starts < 1 || params.eta_points < 1)
        throw BadArgs("progress_suite: counts must be positive");
    if (params.n_min < 2 || params.n_max > 8 || params.n_min > params.n_max)
        throw BadArgs("progress_suite: exhaustive mode needs 2 <= n_min <= n_max <= 8");

    std::vector<VerifyReport> slots(static_cast<std::size_t>(params.ensembles));
    parallel_for(slots.size(), [&](std::size_t e) {
        const EnsembleShape shape =
            shape_for(static_cast<int>(e), params.n_min, params.n_max, params.d_min,
                      params.d_max, /*include_nonconvex=*/false);
        const std::uint64_t ensemble_seed = sub_seed(params.seed, e);
        QuadraticProblem problem =
            gen_quadratic(shape.n, shape.d, params.mu, params.ell, params.noise_scale,
                          /*convex_components=*/true, ensemble_seed, params.g_target);
        VerifyReport report;
        for (int s = 0; s < params.starts; ++s) {
            SplitMix64 radius_rng(sub_seed(sub_seed(ensemble_seed, 0x57A27u), s));
            const double sign = radius_rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double radius = sign * params.x0_scale * (0.2 + 0.8 * radius_rng.uniform());
            const Vector x_start =
                draw_start_point(shape.d, radius, sub_seed(sub_seed(ensemble_seed, 0xD12u), s));
            for (int j = 1; j <= params.eta_points; ++j) {
                const double eta = 2.0 / problem.ell * static_cast<double>(j) /
                                   static_cast<double>(params.eta_points);
                report.merge(
                    check_per_epoch_progress(problem, x_start, eta, std::nullopt, false));
                report.merge(
                    check_per_epoch_quadratic(problem, x_start, eta, std::nullopt, false));
            }
        }
        slots[e] = std::move(report);
    }, params.threads);

    VerifyReport merged;
    for (const auto& slot : slots) merged.merge(slot);
    return merged;
}

std::vector<ConcentrationRow> concentration_suite(const ConcentrationSuiteParams& params) {
    if (params.trials < 1000) throw BadArgs("concentration_suite: trials < 1000");
    struct Cell {
        int n;
        int i;
        double delta;
        bool adversarial;
    };
    std::vector<Cell> cells;
    for (int n : params.n_values) {
        if (n < 4) throw BadArgs("concentration_suite: need n >= 4 for the i grid");
        for (int i : {n / 4, n / 2, 3 * n / 4})
            for (double delta : params.deltas)
                for (bool adversarial : {true, false})
                    cells.push_back({n, i, delta, adversarial});
    }

    std::vector<ConcentrationRow> rows(cells.size());
    // Cells run sequentially here while each cell's trials fan out over the
    // pool; cell-level results are pure functions of (params, cell index).
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        HSInstance instance =
            cell.adversarial
                ? adversarial_pm_instance(cell.n, params.big_g, cell.i, cell.delta)
                : random_ball_instance(cell.n, params.d, params.big_g, cell.i, cell.delta,
                                       sub_seed(params.seed, 2 * c));
        rows[c] = concentration_cell(instance, params.trials, sub_seed(params.seed, 2 * c + 1),
                                     params.threads);
    }
    return rows;
}

double concentration_slack(double delta, long trials) {
    return 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

bool concentration_row_passed(const ConcentrationRow& row) {
    return row.rate <= row.delta + concentration_slack(row.delta, row.trials);
}

namespace {

ChungParams random_tuple(ChungLemma lemma, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ChungParams p;
    p.k0 = rng.uniform(0.5, 20.0);
    p.beta = rng.uniform(0.2, 3.0);
    p.alpha = p.beta + rng.uniform(0.1, 4.0);
    p.xi0 = rng.uniform(0.0, 10.0);
    p.K = 1 + static_cast<long>(rng.below(200));
    p.big_a = rng.uniform(0.0, 10.0);
    if (lemma != ChungLemma::Lemma1) {
        p.n = 2 + static_cast<int>(rng.below(49));
        p.eps = rng.uniform(0.01, 2.0);
        p.big_a1 = rng.uniform(0.0, 10.0);
        p.big_a2 = rng.uniform(0.0, 10.0);
    }
    if (lemma == ChungLemma::Extended) {
        p.big_a3 = rng.uniform(0.0, 10.0);
        p.gamma = rng.uniform(0.05, p.alpha - 0.05);
    }
    return p;
}

}  // namespace

std::vector<ChungRow> chung_suite(const ChungSuiteParams& params) {
    if (params.tuples < 1) throw BadArgs("chung_suite: tuples < 1");
    const std::size_t per_lemma = static_cast<std::size_t>(params.tuples);
    std::vector<ChungRow> rows(3 * per_lemma);
    parallel_for(rows.size(), [&](std::size_t j) {
        const ChungLemma lemma = j < per_lemma ? ChungLemma::Lemma1
                                 : j < 2 * per_lemma ? ChungLemma::Variant
                                                     : ChungLemma::Extended;
        rows[j] = chung_check(random_tuple(lemma, sub_seed(params.seed, j)), lemma);
    }, params.threads);
    return rows;
}

bool chung_rows_passed(const std::vector<ChungRow>& rows) {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ChungRow& row) { return row.margin >= -1e-12; });
}

bool integral_rows_passed(const std::vector<ChungRow>& rows) {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ChungRow& row) { return row.margin >= -1e-10; });
}

std::vector<ChungRow> chung_integral_suite(const ChungSuiteParams& params) {
    if (params.integral_pairs < 1) throw BadArgs("chung_integral_suite: integral_pairs < 1");
    const std::size_t pairs = static_cast<std::size_t>(params.integral_pairs);
    std::vector<ChungRow> rows(2 * pairs);
    parallel_for(rows.size(), [&](std::size_t j) {
        const bool inverse_family = j < pairs;
        SplitMix64 rng(sub_seed(params.seed ^ 0x17EA6A1u, j));
        const double k0 = rng.uniform(0.1, 10.0);
        const long m = 1 + static_cast<long>(rng.below(50));
        const long n = m + 1 + static_cast<long>(rng.below(200));
        // Half of each family goes through the antiderivative, half through
        // adaptive quadrature, so both integration paths stay exercised.
        const bool use_antiderivative = j % 2 == 0;

        IntegralCheckReport report;
        std::string family;
        if (inverse_family) {
            family = "inverse_linear";
            auto f = [k0](double x) { return 1.0 / (k0 + x); };
            auto F = [k0](double x) { return std::log(k0 + x); };
            report = use_antiderivative ? integral_approx_check(f, m, n, F)
                                        : integral_approx_check(f, m, n);
        } else {
            family = "power";
            const double p = rng.uniform(0.1, 3.5) - 1.0;  // alpha - beta - 1 > -1
            auto f = [k0, p](double x) { return std::pow(k0 + x, p); };
            auto F = [k0, p](double x) { return std::pow(k0 + x, p + 1.0) / (p + 1.0); };
            report = use_antiderivative ? integral_approx_check(f, m, n, F)
                                        : integral_approx_check(f, m, n);
            family += p >= 0.0 ? "_nondecreasing" : "_nonincreasing";
        }

        ChungRow row;
        row.lemma = "integral_sandwich";
        row.params = "family=" + family + ";k0=" + std::to_string(k0) +
                     ";m=" + std::to_string(m) + ";n=" + std::to_string(n) +
                     ";quadrature=" + (use_antiderivative ? "closed_form" : "adaptive");
        row.xi_K = report.sum;
        row.bound = report.upper;
        row.margin = std::min(report.upper - report.sum, report.sum - report.lower);
        rows[j] = std::move(row);
    }, params.threads);
    return rows;
}

}  // namespace shufflelab
