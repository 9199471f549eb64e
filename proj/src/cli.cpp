#include "shufflelab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shufflelab/config.hpp"
#include "shufflelab/csv.hpp"
#include "shufflelab/optimizer.hpp"
#include "shufflelab/rates.hpp"
#include "shufflelab/rng.hpp"
#include "shufflelab/suites.hpp"

namespace shufflelab {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

std::string hex64(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// The only timestamped artifact; every CSV stays byte-stable across re-runs.
void write_metadata(const fs::path& dir, const std::string& prefix, const std::string& command,
                    const Config& config, std::uint64_t seed) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["config_hash"] = hex64(fnv1a(config.raw_text()));
    meta["tool_version"] = kToolVersion;
    meta["seed"] = seed;
    meta["timestamp"] = utc_timestamp();
    write_file(dir / (prefix + "_meta.json"), meta.dump(2) + "\n");
}

fs::path output_dir(const Config& config) {
    return fs::path(config.get_string("output.dir", "out"));
}

int threads_from(const Config& config) {
    const long threads = config.get_int("parallel.threads", 0);
    if (threads < 0) throw ConfigError("parallel.threads must be >= 0");
    return static_cast<int>(threads);
}

const std::set<std::string> kProblemKeys = {
    "problem.family",   "problem.n",         "problem.d",
    "problem.mu",       "problem.ell",       "problem.noise_scale",
    "problem.convex_components", "problem.g_target", "problem.perturb_scale",
};

// Shared [problem] + method-block reader used by run/sweep/report.
void load_problem_keys(const Config& config, GridSpec& grid) {
    grid.family = config.get_string("problem.family", "quadratic");
    grid.d = static_cast<int>(config.get_int("problem.d", 1));
    grid.mu = config.get_double("problem.mu", 1.0);
    grid.ell = config.get_double("problem.ell", 2.0);
    grid.noise_scale = config.get_double("problem.noise_scale", 0.5);
    grid.convex_components = config.get_bool("problem.convex_components", false);
    grid.g_target = config.get_double("problem.g_target", 1.0);
    grid.perturb_scale = config.get_double("problem.perturb_scale", 1.0);
}

void load_method_keys(const Config& config, const std::string& section, GridSpec& grid) {
    grid.strategy = strategy_from_name(config.get_string(section + ".strategy", "random_shuffle"));
    grid.schedule =
        schedule_kind_from_name(config.get_string(section + ".schedule", "const_quadratic"));
    grid.alpha = config.get_double(section + ".alpha", 3.0);
    grid.selector = selector_from_name(config.get_string(section + ".selector", "last"));
    grid.x0_scale = config.get_double(section + ".x0_scale", 1.0);
}

std::set<std::string> method_keys(const std::string& section) {
    return {section + ".strategy", section + ".schedule", section + ".alpha",
            section + ".selector", section + ".x0_scale"};
}

void merge_keys(std::set<std::string>& into, const std::set<std::string>& from) {
    into.insert(from.begin(), from.end());
}

}  // namespace

int cmd_run(const std::string& config_path) {
    Config config = Config::parse_file(config_path);
    std::set<std::string> allowed = {"seed",       "output.dir", "output.prefix",
                                     "run.K",      "run.selector", "parallel.threads"};
    merge_keys(allowed, kProblemKeys);
    merge_keys(allowed, method_keys("run"));
    config.require_known_keys(allowed);

    GridSpec spec;  // reused as a plain parameter bag for the single run
    load_problem_keys(config, spec);
    load_method_keys(config, "run", spec);
    const int K = static_cast<int>(config.get_int("run.K"));
    const int n = static_cast<int>(config.get_int("problem.n"));
    const std::uint64_t seed = resolve_seed(config, "seed");
    const fs::path dir = output_dir(config);
    const std::string prefix = config.get_string("output.prefix", "run");

    const std::uint64_t problem_seed = sub_seed(seed, 0);
    const std::uint64_t start_seed = sub_seed(seed, 1);
    const std::uint64_t run_seed = sub_seed(seed, 2);

    ProblemHandle handle = [&] {
        if (spec.family == "quadratic")
            return ProblemHandle(gen_quadratic(n, spec.d, spec.mu, spec.ell, spec.noise_scale,
                                               spec.convex_components, problem_seed,
                                               spec.g_target));
        if (spec.family == "pl")
            return ProblemHandle(gen_pl(n, spec.perturb_scale, problem_seed), spec.x0_scale);
        throw ConfigError("problem.family must be quadratic or pl");
    }();
    const Vector x0 = spec.family == "pl"
                          ? draw_start_point(1, spec.x0_scale, start_seed)
                          : draw_start_point(spec.d, spec.x0_scale, start_seed);
    const Schedule schedule = make_schedule(spec.schedule, handle.mu(), handle.ell(), n, K,
                                            spec.alpha);

    write_metadata(dir, prefix, "run", config, seed);
    try {
        Trajectory trajectory = run(handle, spec.strategy, schedule, K, x0, run_seed);
        write_file(dir / (prefix + "_trajectory.csv"),
                   trajectory_to_csv(trajectory, problem_hash(handle)));
        const Selection picked = select(trajectory, spec.selector, handle);
        std::cout << "run: " << trajectory.strategy << " + " << trajectory.schedule << ", n=" << n
                  << ", K=" << K << ", seed=" << seed << "\n"
                  << "  requirement_met=" << (schedule.requirement(n, K) ? "yes" : "no")
                  << ", final subopt=" << csv_double(trajectory.subopt.back())
                  << ", " << selector_name(spec.selector)
                  << " subopt=" << csv_double(picked.value) << "\n";
        return 0;
    } catch (const DivergedRun& diverged) {
        // Persist the partial trajectory; its last row is flagged with
        // infinite metrics.
        write_file(dir / (prefix + "_trajectory.csv"),
                   trajectory_to_csv(diverged.partial, problem_hash(handle)));
        std::cerr << "run: " << diverged.what() << "\n";
        return 3;
    }
}

namespace {

ContractionSuiteParams contraction_params(const Config& config, std::uint64_t seed, int threads) {
    ContractionSuiteParams params;
    params.ensembles = static_cast<int>(config.get_int("contraction.ensembles", 50));
    params.n_min = static_cast<int>(config.get_int("contraction.n_min", 2));
    params.n_max = static_cast<int>(config.get_int("contraction.n_max", 6));
    params.d_min = static_cast<int>(config.get_int("contraction.d_min", 1));
    params.d_max = static_cast<int>(config.get_int("contraction.d_max", 4));
    params.eta_points = static_cast<int>(config.get_int("contraction.eta_points", 4));
    params.include_nonconvex = config.get_bool("contraction.include_nonconvex", true);
    params.mu = config.get_double("contraction.mu", 1.0);
    params.ell = config.get_double("contraction.ell", 4.0);
    params.noise_scale = config.get_double("contraction.noise_scale", 0.8);
    params.g_target = config.get_double("contraction.g_target", 1.0);
    params.seed = sub_seed(seed, 101);
    params.threads = threads;
    return params;
}

ProgressSuiteParams progress_params(const Config& config, std::uint64_t seed, int threads) {
    ProgressSuiteParams params;
    params.ensembles = static_cast<int>(config.get_int("progress.ensembles", 20));
    params.starts = static_cast<int>(config.get_int("progress.starts", 5));
    params.eta_points = static_cast<int>(config.get_int("progress.eta_points", 3));
    params.n_min = static_cast<int>(config.get_int("progress.n_min", 2));
    params.n_max = static_cast<int>(config.get_int("progress.n_max", 6));
    params.d_min = static_cast<int>(config.get_int("progress.d_min", 1));
    params.d_max = static_cast<int>(config.get_int("progress.d_max", 4));
    params.mu = config.get_double("progress.mu", 1.0);
    params.ell = config.get_double("progress.ell", 4.0);
    params.noise_scale = config.get_double("progress.noise_scale", 0.8);
    params.g_target = config.get_double("progress.g_target", 1.0);
    params.x0_scale = config.get_double("progress.x0_scale", 2.0);
    params.seed = sub_seed(seed, 102);
    params.threads = threads;
    return params;
}

ConcentrationSuiteParams concentration_params(const Config& config, std::uint64_t seed,
                                              int threads) {
    ConcentrationSuiteParams params;
    if (config.has("concentration.n_values")) {
        params.n_values.clear();
        for (long v : config.get_int_list("concentration.n_values"))
            params.n_values.push_back(static_cast<int>(v));
    }
    if (config.has("concentration.deltas")) {
        params.deltas.clear();
        std::istringstream in(config.get_string("concentration.deltas"));
        std::string item;
        while (std::getline(in, item, ',')) params.deltas.push_back(std::stod(item));
    }
    params.trials = config.get_int("concentration.trials", 100000);
    params.d = static_cast<int>(config.get_int("concentration.d", 3));
    params.big_g = config.get_double("concentration.g", 1.0);
    params.seed = sub_seed(seed, 103);
    params.threads = threads;
    return params;
}

ChungSuiteParams chung_params(const Config& config, std::uint64_t seed, int threads) {
    ChungSuiteParams params;
    params.tuples = static_cast<int>(config.get_int("chung.tuples", 500));
    params.integral_pairs = static_cast<int>(config.get_int("chung.integral_pairs", 100));
    params.seed = sub_seed(seed, 104);
    params.threads = threads;
    return params;
}

const std::set<std::string> kVerifyKeys = {
    "seed", "output.dir", "output.prefix", "parallel.threads",
    "contraction.ensembles", "contraction.n_min", "contraction.n_max", "contraction.d_min",
    "contraction.d_max", "contraction.eta_points", "contraction.include_nonconvex",
    "contraction.mu", "contraction.ell", "contraction.noise_scale", "contraction.g_target",
    "progress.ensembles", "progress.starts", "progress.eta_points", "progress.n_min",
    "progress.n_max", "progress.d_min", "progress.d_max", "progress.mu", "progress.ell",
    "progress.noise_scale", "progress.g_target", "progress.x0_scale",
    "concentration.n_values", "concentration.deltas", "concentration.trials", "concentration.d",
    "concentration.g",
    "chung.tuples", "chung.integral_pairs",
};

}  // namespace

int cmd_verify(const std::string& suite, const std::string& config_path,
               bool eta_beyond_threshold) {
    const bool all = suite == "all";
    if (!all && suite != "contraction" && suite != "concentration" && suite != "chung" &&
        suite != "progress")
        throw ConfigError("unknown verify suite: " + suite);
    if (eta_beyond_threshold && !(suite == "contraction"))
        throw ConfigError("--eta-beyond-threshold applies to the contraction suite only");

    Config config = Config::parse_file(config_path);
    config.require_known_keys(kVerifyKeys);
    const std::uint64_t seed = resolve_seed(config, "seed");
    const int threads = threads_from(config);
    const fs::path dir = output_dir(config);
    const std::string prefix = config.get_string("output.prefix", "verify");

    bool all_passed = true;
    write_metadata(dir, prefix, "verify:" + suite, config, seed);

    if (suite == "contraction" && eta_beyond_threshold) {
        VerifyReport report = contraction_probe_suite(contraction_params(config, seed, threads));
        write_file(dir / (prefix + "_contraction_probe.csv"), verify_report_to_csv(report));
        std::cout << "contraction probe: " << report.rows.size()
                  << " rows (exploratory, never asserts)\n";
        return 0;
    }

    if (all || suite == "contraction") {
        VerifyReport report = contraction_suite(contraction_params(config, seed, threads));
        write_file(dir / (prefix + "_contraction.csv"), verify_report_to_csv(report));
        std::size_t violations = 0;
        for (const auto& row : report.rows) violations += row.passed ? 0 : 1;
        std::cout << "contraction: " << report.rows.size() << " rows, " << violations
                  << " violations\n";
        all_passed = all_passed && report.passed;
    }
    if (all || suite == "concentration") {
        auto rows = concentration_suite(concentration_params(config, seed, threads));
        write_file(dir / (prefix + "_concentration.csv"), concentration_rows_to_csv(rows));
        std::size_t violations = 0;
        for (const auto& row : rows) violations += concentration_row_passed(row) ? 0 : 1;
        std::cout << "concentration: " << rows.size() << " cells, " << violations
                  << " above the binomial slack\n";
        all_passed = all_passed && violations == 0;
    }
    if (all || suite == "chung") {
        const ChungSuiteParams params = chung_params(config, seed, threads);
        auto rows = chung_suite(params);
        auto integral_rows = chung_integral_suite(params);
        const bool passed = chung_rows_passed(rows) && integral_rows_passed(integral_rows);
        rows.insert(rows.end(), integral_rows.begin(), integral_rows.end());
        write_file(dir / (prefix + "_chung.csv"), chung_rows_to_csv(rows));
        std::cout << "chung: " << rows.size() << " rows, "
                  << (passed ? "all bounds dominate" : "VIOLATIONS") << "\n";
        all_passed = all_passed && passed;
    }
    if (all || suite == "progress") {
        VerifyReport report = progress_suite(progress_params(config, seed, threads));
        write_file(dir / (prefix + "_progress.csv"), verify_report_to_csv(report));
        std::size_t violations = 0;
        for (const auto& row : report.rows) violations += row.passed ? 0 : 1;
        std::cout << "progress: " << report.rows.size() << " rows, " << violations
                  << " violations\n";
        all_passed = all_passed && report.passed;
    }

    if (!all_passed) {
        std::cerr << "verify: at least one bound failed; see the CSV report\n";
        return 4;
    }
    return 0;
}

namespace {

GridSpec grid_from_config(const Config& config) {
    GridSpec grid;
    load_problem_keys(config, grid);
    load_method_keys(config, "method", grid);
    grid.n_values.clear();
    for (long v : config.get_int_list("grid.n_values"))
        grid.n_values.push_back(static_cast<int>(v));
    grid.K_values.clear();
    for (long v : config.get_int_list("grid.K_values"))
        grid.K_values.push_back(static_cast<int>(v));
    grid.trials = static_cast<int>(config.get_int("grid.trials", 1));
    grid.fixed_problem = config.get_bool("grid.fixed_problem", true);
    return grid;
}

const std::set<std::string> kGridKeys = {"grid.n_values", "grid.K_values", "grid.trials",
                                         "grid.fixed_problem"};

}  // namespace

int cmd_sweep(const std::string& config_path) {
    Config config = Config::parse_file(config_path);
    std::set<std::string> allowed = {"seed", "output.dir", "output.prefix", "parallel.threads"};
    merge_keys(allowed, kProblemKeys);
    merge_keys(allowed, method_keys("method"));
    merge_keys(allowed, kGridKeys);
    config.require_known_keys(allowed);

    const GridSpec grid = grid_from_config(config);
    const std::uint64_t seed = resolve_seed(config, "seed");
    const fs::path dir = output_dir(config);
    const std::string prefix = config.get_string("output.prefix", "sweep");

    RateTable table = sweep(grid, seed, threads_from(config));
    write_metadata(dir, prefix, "sweep", config, seed);
    write_file(dir / (prefix + "_rates.csv"), rate_table_to_csv(table));

    std::size_t flagged = 0;
    for (const auto& row : table) {
        if (!std::isfinite(row.mean)) ++flagged;
        std::cout << "sweep: n=" << row.n << " K=" << row.K << " mean=" << csv_double(row.mean)
                  << " stderr=" << csv_double(row.std_error)
                  << " requirement_met=" << (row.requirement_met ? "yes" : "no") << "\n";
    }
    if (flagged > 0)
        std::cerr << "sweep: " << flagged << " grid point(s) flagged non-finite\n";
    return 0;
}

int cmd_fit(const std::string& config_path) {
    Config config = Config::parse_file(config_path);
    config.require_known_keys({"seed", "output.dir", "output.prefix", "fit.input", "fit.axis",
                               "fit.fixed_value"});
    const std::string input = config.get_string("fit.input");
    const std::string axis = config.get_string("fit.axis");
    const int fixed_value = static_cast<int>(config.get_int("fit.fixed_value"));
    const fs::path dir = output_dir(config);
    const std::string prefix = config.get_string("output.prefix", "fit");

    std::ifstream in(input, std::ios::binary);
    if (!in) throw ConfigError("cannot open fit.input: " + input);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    RateTable table = rate_table_from_csv(buffer.str());

    const RateFit fit = fit_exponent(table, axis, fixed_value);
    write_metadata(dir, prefix, "fit", config, resolve_seed(config, "seed"));
    write_file(dir / (prefix + "_fits.csv"), rate_fits_to_csv({fit}));
    std::cout << "fit: axis=" << fit.axis << " slope=" << csv_double(fit.slope)
              << " intercept=" << csv_double(fit.intercept)
              << " r_squared=" << csv_double(fit.r_squared) << " points=" << fit.points << "\n";
    return 0;
}

int cmd_report(const std::string& config_path) {
    Config config = Config::parse_file(config_path);
    // Method labels are config-defined, so the allowed key set is assembled
    // after reading report.methods.
    std::set<std::string> allowed = {"seed", "output.dir", "output.prefix", "parallel.threads",
                                     "report.methods"};
    merge_keys(allowed, kProblemKeys);
    merge_keys(allowed, kGridKeys);

    std::vector<std::string> labels;
    {
        std::istringstream in(config.get_string("report.methods"));
        std::string item;
        while (std::getline(in, item, ',')) {
            const auto begin = item.find_first_not_of(" \t");
            if (begin == std::string::npos) continue;
            const auto end = item.find_last_not_of(" \t");
            labels.push_back(item.substr(begin, end - begin + 1));
        }
    }
    if (labels.empty()) throw ConfigError("report.methods lists no methods");
    for (const auto& label : labels) merge_keys(allowed, method_keys("method." + label));
    config.require_known_keys(allowed);

    GridSpec base;
    load_problem_keys(config, base);
    base.n_values.clear();
    for (long v : config.get_int_list("grid.n_values"))
        base.n_values.push_back(static_cast<int>(v));
    base.K_values.clear();
    for (long v : config.get_int_list("grid.K_values"))
        base.K_values.push_back(static_cast<int>(v));
    base.trials = static_cast<int>(config.get_int("grid.trials", 1));
    base.fixed_problem = config.get_bool("grid.fixed_problem", true);

    std::vector<MethodGrid> methods;
    for (const auto& label : labels) {
        GridSpec grid = base;
        load_method_keys(config, "method." + label, grid);
        methods.push_back({label, grid});
    }

    const std::uint64_t seed = resolve_seed(config, "seed");
    const fs::path dir = output_dir(config);
    const std::string prefix = config.get_string("output.prefix", "report");

    CompareReport report = compare_methods(methods, seed, threads_from(config));
    write_metadata(dir, prefix, "report", config, seed);
    write_file(dir / (prefix + "_compare.csv"), compare_report_to_csv(report));
    if (!report.fits.empty()) {
        CsvWriter csv("method,axis,slope,intercept,r_squared,points");
        for (const auto& [label, fit] : report.fits) {
            csv.field(label)
                .field(fit.axis)
                .field(fit.slope)
                .field(fit.intercept)
                .field(fit.r_squared)
                .field(fit.points);
            csv.end_row();
        }
        write_file(dir / (prefix + "_slopes.csv"), csv.str());
    }
    for (std::size_t j = 0; j < report.rows.size(); ++j) {
        const auto& row = report.rows[j];
        std::cout << "report: method=" << row.method << " n=" << row.n << " K=" << row.K
                  << " mean=" << csv_double(row.mean)
                  << " ratio=" << csv_double(report.ratios[j]) << "\n";
    }
    return 0;
}

namespace {

void print_usage(std::ostream& out) {
    out << "usage: shufflelab <command> [options]\n"
           "\n"
           "commands:\n"
           "  run <config>                 one experiment; trajectory CSV + metadata JSON\n"
           "  verify <suite> <config>      suite: all|contraction|concentration|chung|progress\n"
           "         [--eta-beyond-threshold]   contraction probe mode (never asserts)\n"
           "  sweep <config>               (n, K) grid sweep; rate-table CSV\n"
           "  fit <config>                 log-log exponent fit of a rate table\n"
           "  report <config>              multi-method comparison at equal budget\n"
           "\n"
           "exit codes: 0 ok, 2 usage/config, 3 numerical failure, 4 bound violation\n"
           "seed precedence: SHUFFLELAB_SEED env > config 'seed' key > default "
        << kDefaultSeed << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
            print_usage(std::cout);
            return args.empty() ? 2 : 0;
        }
        if (args[0] == "--version") {
            std::cout << "shufflelab " << kToolVersion << "\n";
            return 0;
        }
        const std::string command = args[0];
        if (command == "run" || command == "sweep" || command == "fit" || command == "report") {
            if (args.size() != 2) {
                print_usage(std::cerr);
                return 2;
            }
            if (command == "run") return cmd_run(args[1]);
            if (command == "sweep") return cmd_sweep(args[1]);
            if (command == "fit") return cmd_fit(args[1]);
            return cmd_report(args[1]);
        }
        if (command == "verify") {
            bool probe = false;
            std::vector<std::string> positional;
            for (std::size_t j = 1; j < args.size(); ++j) {
                if (args[j] == "--eta-beyond-threshold")
                    probe = true;
                else
                    positional.push_back(args[j]);
            }
            if (positional.size() != 2) {
                print_usage(std::cerr);
                return 2;
            }
            return cmd_verify(positional[0], positional[1], probe);
        }
        std::cerr << "unknown command: " << command << "\n";
        print_usage(std::cerr);
        return 2;
    } catch (const BoundViolated& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 4;
    } catch (const NonFinite& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 3;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
}

}  // namespace shufflelab
