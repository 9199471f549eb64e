#include "shufflelab/rates.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "shufflelab/csv.hpp"
#include "shufflelab/parallel.hpp"
#include "shufflelab/rng.hpp"

namespace shufflelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_grid(const GridSpec& grid) {
    if (grid.n_values.empty() || grid.K_values.empty())
        throw BadArgs("sweep: empty grid");
    for (int n : grid.n_values)
        if (n < 2) throw BadArgs("sweep: n must be at least 2");
    for (int K : grid.K_values)
        if (K < 1) throw BadArgs("sweep: K must be at least 1");
    if (grid.trials < 1) throw BadArgs("sweep: trials must be at least 1");
    if (grid.family != "quadratic" && grid.family != "pl")
        throw BadArgs("sweep: unknown family '" + grid.family + "'");
    if (grid.family == "pl" && grid.d != 1)
        throw BadArgs("sweep: the pl family is scalar (d = 1)");
    if (grid.x0_scale < 0.0) throw BadArgs("sweep: negative x0_scale");
}

struct TrialSetup {
    ProblemHandle handle;
    Vector x0;
};

// Build the problem + start point for one trial. `generator_seed` already
// encodes the fixed-vs-fresh choice; the start direction comes from its own
// sub-stream so problem generation and x0 never share draws.
TrialSetup make_setup(const GridSpec& grid, int n, std::uint64_t generator_seed) {
    const std::uint64_t problem_seed = sub_seed(generator_seed, 0);
    const std::uint64_t start_seed = sub_seed(generator_seed, 1);
    if (grid.family == "quadratic") {
        QuadraticProblem problem =
            gen_quadratic(n, grid.d, grid.mu, grid.ell, grid.noise_scale,
                          grid.convex_components, problem_seed, grid.g_target);
        Vector x0 = draw_start_point(grid.d, grid.x0_scale, start_seed);
        return {ProblemHandle(std::move(problem)), std::move(x0)};
    }
    PLProblem problem = gen_pl(n, grid.perturb_scale, problem_seed);
    Vector x0(1);
    x0(0) = grid.x0_scale;
    return {ProblemHandle(std::move(problem), grid.x0_scale), std::move(x0)};
}

Schedule schedule_for(const GridSpec& grid, const ProblemHandle& handle, int n, int K) {
    return make_schedule(grid.schedule, handle.mu(), handle.ell(), n, K, grid.alpha);
}

}  // namespace

Vector draw_start_point(int d, double scale, std::uint64_t seed) {
    if (d < 1) throw BadDimension("draw_start_point: d must be positive");
    if (scale == 0.0) return Vector::Zero(d);
    if (d == 1) {
        Vector x0(1);
        x0(0) = scale;
        return x0;
    }
    SplitMix64 rng(seed);
    Vector dir(d);
    double norm = 0.0;
    do {
        for (int c = 0; c < d; ++c) dir(c) = rng.normal();
        norm = dir.norm();
    } while (norm < 1e-12);
    return (scale / norm) * dir;
}

RateTable sweep(const GridSpec& grid, std::uint64_t base_seed, int threads) {
    validate_grid(grid);
    const std::size_t n_count = grid.n_values.size();
    const std::size_t k_count = grid.K_values.size();
    const std::size_t points = n_count * k_count;
    const std::size_t trials = static_cast<std::size_t>(grid.trials);

    std::vector<double> values(points * trials, 0.0);
    std::vector<std::uint8_t> diverged(points * trials, 0);

    parallel_for(points * trials, [&](std::size_t task) {
        const std::size_t point = task / trials;
        const std::size_t trial = task % trials;
        const int n = grid.n_values[point / k_count];
        const int K = grid.K_values[point % k_count];
        const std::uint64_t point_seed = sub_seed(base_seed, point);
        const std::uint64_t trial_base = sub_seed(point_seed, 1);

        // Fixed problem: every trial of the point shares generator stream 0;
        // fresh problems: each trial owns a stream derived from its index.
        const std::uint64_t generator_seed =
            grid.fixed_problem ? sub_seed(point_seed, 0)
                               : sub_seed(sub_seed(point_seed, 2), trial);
        const std::uint64_t run_seed = sub_seed(trial_base, trial);

        TrialSetup setup = make_setup(grid, n, generator_seed);
        const Schedule schedule = schedule_for(grid, setup.handle, n, K);
        try {
            Trajectory trajectory =
                run(setup.handle, grid.strategy, schedule, K, setup.x0, run_seed);
            values[task] = select(trajectory, grid.selector, setup.handle).value;
        } catch (const NonFinite&) {
            values[task] = kInf;
            diverged[task] = 1;
        }
    }, threads);

    RateTable table;
    table.reserve(points);
    for (std::size_t point = 0; point < points; ++point) {
        const int n = grid.n_values[point / k_count];
        const int K = grid.K_values[point % k_count];
        const std::uint64_t point_seed = sub_seed(base_seed, point);

        RateRow row;
        row.family = grid.family;
        row.method = strategy_name(grid.strategy);
        row.schedule = schedule_kind_name(grid.schedule);
        row.selector = selector_name(grid.selector);
        row.n = n;
        row.K = K;
        row.trials = grid.trials;
        row.seed = point_seed;

        // The requirement flag is evaluated on trial 0's problem constants
        // (identical across trials when the problem is fixed).
        const std::uint64_t generator_seed = grid.fixed_problem
                                                 ? sub_seed(point_seed, 0)
                                                 : sub_seed(sub_seed(point_seed, 2), 0);
        TrialSetup setup = make_setup(grid, n, generator_seed);
        row.requirement_met = schedule_for(grid, setup.handle, n, K).requirement(n, K);

        bool any_diverged = false;
        double sum = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const std::size_t task = point * trials + trial;
            any_diverged = any_diverged || diverged[task] != 0;
            sum += values[task];
        }
        if (any_diverged || !std::isfinite(sum)) {
            row.mean = kInf;
            row.std_error = kInf;
        } else {
            row.mean = sum / static_cast<double>(trials);
            double ss = 0.0;
            for (std::size_t trial = 0; trial < trials; ++trial) {
                const double dev = values[point * trials + trial] - row.mean;
                ss += dev * dev;
            }
            row.std_error = trials > 1
                                ? std::sqrt(ss / static_cast<double>(trials - 1) /
                                            static_cast<double>(trials))
                                : 0.0;
        }
        table.push_back(std::move(row));
    }
    return table;
}

std::string rate_table_to_csv(const RateTable& table) {
    CsvWriter csv("family,method,schedule,selector,n,K,trials,mean,stderr,requirement_met,seed");
    for (const auto& row : table) {
        csv.field(row.family)
            .field(row.method)
            .field(row.schedule)
            .field(row.selector)
            .field(row.n)
            .field(row.K)
            .field(row.trials)
            .field(row.mean)
            .field(row.std_error)
            .field(row.requirement_met)
            .field(static_cast<unsigned long long>(row.seed));
        csv.end_row();
    }
    return csv.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

RateTable rate_table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw BadArgs("rate_table_from_csv: empty input");
    if (line != "family,method,schedule,selector,n,K,trials,mean,stderr,requirement_met,seed")
        throw BadArgs("rate_table_from_csv: unexpected header '" + line + "'");
    RateTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 11)
            throw BadArgs("rate_table_from_csv: malformed row '" + line + "'");
        RateRow row;
        row.family = fields[0];
        row.method = fields[1];
        row.schedule = fields[2];
        row.selector = fields[3];
        row.n = std::atoi(fields[4].c_str());
        row.K = std::atoi(fields[5].c_str());
        row.trials = std::atoi(fields[6].c_str());
        row.mean = std::strtod(fields[7].c_str(), nullptr);
        row.std_error = std::strtod(fields[8].c_str(), nullptr);
        row.requirement_met = fields[9] == "1";
        row.seed = std::strtoull(fields[10].c_str(), nullptr, 10);
        table.push_back(std::move(row));
    }
    return table;
}

RateFit fit_exponent(const RateTable& table, const std::string& axis, int fixed_value) {
    if (axis != "n" && axis != "K") throw BadArgs("fit_exponent: axis must be 'n' or 'K'");
    std::vector<double> xs, ys;
    for (const auto& row : table) {
        const int axis_value = axis == "n" ? row.n : row.K;
        const int other_value = axis == "n" ? row.K : row.n;
        if (other_value != fixed_value) continue;
        if (!std::isfinite(row.mean))
            throw NonFinite("fit_exponent: non-finite mean in the table");
        if (row.mean <= 0.0)
            throw NonPositiveMean("fit_exponent: mean must be positive for a log fit");
        xs.push_back(std::log(static_cast<double>(axis_value)));
        ys.push_back(std::log(row.mean));
    }
    if (xs.size() < 4) throw TooFewPoints("fit_exponent: need at least 4 points");

    const double m = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        sx += xs[j];
        sy += ys[j];
    }
    const double mean_x = sx / m, mean_y = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        sxx += (xs[j] - mean_x) * (xs[j] - mean_x);
        sxy += (xs[j] - mean_x) * (ys[j] - mean_y);
    }
    if (sxx <= 0.0) throw BadArgs("fit_exponent: axis values are all identical");

    RateFit fit;
    fit.axis = axis;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.points = static_cast<int>(xs.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double pred = fit.intercept + fit.slope * xs[j];
        ss_res += (ys[j] - pred) * (ys[j] - pred);
        ss_tot += (ys[j] - mean_y) * (ys[j] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    return fit;
}

std::string rate_fits_to_csv(const std::vector<RateFit>& fits) {
    CsvWriter csv("axis,slope,intercept,r_squared,points");
    for (const auto& fit : fits) {
        csv.field(fit.axis)
            .field(fit.slope)
            .field(fit.intercept)
            .field(fit.r_squared)
            .field(fit.points);
        csv.end_row();
    }
    return csv.str();
}

CompareReport compare_methods(const std::vector<MethodGrid>& methods, std::uint64_t base_seed,
                              int threads) {
    if (methods.empty()) throw BadArgs("compare_methods: no methods");
    for (const auto& method : methods) {
        if (method.grid.n_values != methods.front().grid.n_values ||
            method.grid.K_values != methods.front().grid.K_values)
            throw BadArgs("compare_methods: all methods must share the (n, K) grid");
    }

    CompareReport report;
    std::vector<RateTable> tables;
    tables.reserve(methods.size());
    for (const auto& method : methods)
        tables.push_back(sweep(method.grid, base_seed, threads));

    const std::size_t points = tables.front().size();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t p = 0; p < points; ++p) {
            RateRow row = tables[m][p];
            row.method = methods[m].label;
            const double baseline = tables[0][p].mean;
            report.ratios.push_back(baseline > 0.0 ? row.mean / baseline
                                                   : std::numeric_limits<double>::quiet_NaN());
            report.rows.push_back(std::move(row));
        }
        // Axis fits are advisory: only emitted where the grid has enough
        // points and clean means.
        const auto& grid = methods[m].grid;
        if (grid.K_values.size() >= 4) {
            try {
                report.fits.emplace_back(methods[m].label,
                                         fit_exponent(tables[m], "K", grid.n_values.front()));
            } catch (const Error&) {
            }
        }
        if (grid.n_values.size() >= 4) {
            try {
                report.fits.emplace_back(methods[m].label,
                                         fit_exponent(tables[m], "n", grid.K_values.front()));
            } catch (const Error&) {
            }
        }
    }
    return report;
}

std::string compare_report_to_csv(const CompareReport& report) {
    CsvWriter csv("method,n,K,mean,stderr,ratio_vs_baseline,requirement_met");
    for (std::size_t j = 0; j < report.rows.size(); ++j) {
        const auto& row = report.rows[j];
        csv.field(row.method)
            .field(row.n)
            .field(row.K)
            .field(row.mean)
            .field(row.std_error)
            .field(report.ratios[j])
            .field(row.requirement_met);
        csv.end_row();
    }
    return csv.str();
}

}  // namespace shufflelab
