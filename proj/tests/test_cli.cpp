#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "shufflelab/config.hpp"

using namespace shufflelab;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return SHUFFLELAB_CLI_PATH; }

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("shufflelab_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli_command(const std::string& args) {
    const int status = std::system((std::string(cli_path()) + " " + args +
                                    " > /dev/null 2> /dev/null")
                                       .c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing: sections, comments, types, strictness") {
    const Config c = Config::parse_text(
        "# top comment\n"
        "seed = 99\n"
        "[problem]\n"
        "family = quadratic  # trailing comment\n"
        "n = 8\n"
        "mu = 0.5\n"
        "[grid]\n"
        "n_values = 4, 8,16\n"
        "fixed_problem = true\n");
    CHECK(c.get_int("seed") == 99);
    CHECK(c.get_string("problem.family") == "quadratic");
    CHECK(c.get_int("problem.n") == 8);
    CHECK(c.get_double("problem.mu") == 0.5);
    CHECK(c.get_bool("grid.fixed_problem", false));
    CHECK(c.get_int_list("grid.n_values") == std::vector<long>{4, 8, 16});
    CHECK(c.get_int("problem.missing", 7) == 7);
    CHECK(c.has("seed"));
    CHECK_FALSE(c.has("nope"));

    CHECK_THROWS_AS(c.get_int("problem.family"), ConfigError);   // not an integer
    CHECK_THROWS_AS(c.get_string("problem.missing"), ConfigError);
    CHECK_THROWS_AS(
        c.require_known_keys({"seed", "problem.family", "problem.n", "problem.mu"}),
        ConfigError);  // grid.* unknown
    CHECK_THROWS_AS(Config::parse_text("a = 1\na = 2\n"), ConfigError);  // duplicate
    CHECK_THROWS_AS(Config::parse_text("novalue\n"), ConfigError);
}

TEST_CASE("seed resolution prefers the environment, then config, then default") {
    const Config with = Config::parse_text("seed = 5\n");
    const Config without = Config::parse_text("");
    unsetenv("SHUFFLELAB_SEED");
    CHECK(resolve_seed(with, "seed") == 5);
    CHECK(resolve_seed(without, "seed") == kDefaultSeed);
    setenv("SHUFFLELAB_SEED", "777", 1);
    CHECK(resolve_seed(with, "seed") == 777);
    setenv("SHUFFLELAB_SEED", "not_a_number", 1);
    CHECK_THROWS_AS(resolve_seed(with, "seed"), ConfigError);
    unsetenv("SHUFFLELAB_SEED");
}

TEST_CASE("run: minimal config produces trajectory and metadata, exit 0") {
    TempDir dir("run_ok");
    const fs::path cfg = dir.path / "run.cfg";
    write(cfg, "seed = 11\n"
               "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "prefix = demo\n"
               "[problem]\n"
               "family = quadratic\n"
               "n = 4\n"
               "d = 2\n"
               "mu = 1.0\n"
               "ell = 2.0\n"
               "[run]\n"
               "K = 16\n"
               "schedule = const_quadratic\n"
               "strategy = random_shuffle\n");
    CHECK(run_cli_command("run " + cfg.string()) == 0);
    const std::string csv = slurp(dir.path / "out" / "demo_trajectory.csv");
    CHECK(csv.find("epoch,subopt,dist2") != std::string::npos);
    CHECK(csv.find("# schedule=const_quadratic") != std::string::npos);
    const std::string meta = slurp(dir.path / "out" / "demo_meta.json");
    CHECK(meta.find("\"seed\": 11") != std::string::npos);
    CHECK(meta.find("\"config_hash\"") != std::string::npos);
}

TEST_CASE("run: missing config file exits 2") {
    CHECK(run_cli_command("run /nonexistent/path.cfg") == 2);
    CHECK(run_cli_command("") == 2);
    CHECK(run_cli_command("frobnicate x") == 2);
}

TEST_CASE("run: unknown config keys exit 2") {
    TempDir dir("run_badkey");
    const fs::path cfg = dir.path / "bad.cfg";
    write(cfg, "[problem]\nfamily = quadratic\nn = 4\n[run]\nK = 4\n[typo]\nx = 1\n");
    CHECK(run_cli_command("run " + cfg.string()) == 2);
}

TEST_CASE("run: divergent steps exit 3 and flag the written trajectory") {
    TempDir dir("run_div");
    const fs::path cfg = dir.path / "div.cfg";
    // mu = 1e-6 against ell = 1 makes the tail schedule's constant step
    // roughly six orders of magnitude past the stability limit.
    write(cfg, "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "prefix = div\n"
               "[problem]\n"
               "family = quadratic\n"
               "n = 2\n"
               "d = 2\n"
               "mu = 0.000001\n"
               "ell = 1.0\n"
               "[run]\n"
               "K = 40\n"
               "schedule = const_tail\n"
               "strategy = random_shuffle\n");
    CHECK(run_cli_command("run " + cfg.string()) == 3);
    const std::string csv = slurp(dir.path / "out" / "div_trajectory.csv");
    CHECK(csv.find("inf") != std::string::npos);  // flagged final row
}

TEST_CASE("verify: unknown suite exits 2; probe mode always exits 0") {
    TempDir dir("verify");
    const fs::path cfg = dir.path / "v.cfg";
    write(cfg, "seed = 3\n"
               "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "[contraction]\n"
               "ensembles = 4\n"
               "eta_points = 2\n");
    CHECK(run_cli_command("verify bogus_suite " + cfg.string()) == 2);
    CHECK(run_cli_command("verify contraction --eta-beyond-threshold " + cfg.string()) == 0);
    CHECK(fs::exists(dir.path / "out" / "verify_contraction_probe.csv"));
    // The probe flag is contraction-specific.
    CHECK(run_cli_command("verify chung --eta-beyond-threshold " + cfg.string()) == 2);
}

TEST_CASE("verify: small contraction suite passes, exit 0") {
    TempDir dir("verify_ok");
    const fs::path cfg = dir.path / "v.cfg";
    write(cfg, "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "[contraction]\n"
               "ensembles = 4\n"
               "n_max = 4\n"
               "eta_points = 2\n");
    CHECK(run_cli_command("verify contraction " + cfg.string()) == 0);
    const std::string csv = slurp(dir.path / "out" / "verify_contraction.csv");
    CHECK(csv.rfind("lemma,n,d,eta,lhs,rhs,margin,mode,samples\n", 0) == 0);
}

TEST_CASE("sweep then fit: planted data flows through the file interface") {
    TempDir dir("fit");
    // fit on a hand-written planted power-law table: slope -2.
    const fs::path table = dir.path / "rates.csv";
    std::ostringstream csv;
    csv.precision(17);
    csv << "family,method,schedule,selector,n,K,trials,mean,stderr,"
           "requirement_met,seed\n";
    for (int K : {8, 16, 32, 64})
        csv << "quadratic,random_shuffle,const_quadratic,last,4," << K << ",1,"
            << 1.0 / (K * K) << ",0,1,1\n";
    write(table, csv.str());
    const fs::path cfg = dir.path / "fit.cfg";
    write(cfg, "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "prefix = pl\n"
               "[fit]\n"
               "input = " + table.string() + "\n"
               "axis = K\n"
               "fixed_value = 4\n");
    CHECK(run_cli_command("fit " + cfg.string()) == 0);
    const std::string fits = slurp(dir.path / "out" / "pl_fits.csv");
    REQUIRE(fits.rfind("axis,slope,intercept,r_squared,points\n", 0) == 0);
    // Parse the slope field of the single data row.
    const std::string row = fits.substr(fits.find('\n') + 1);
    const auto c1 = row.find(',');
    const auto c2 = row.find(',', c1 + 1);
    CHECK(row.substr(0, c1) == "K");
    CHECK(std::stod(row.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(-2.0).epsilon(1e-9));

    // Three points are not enough: exit 2.
    const fs::path short_table = dir.path / "short.csv";
    std::ostringstream short_csv;
    short_csv.precision(17);
    short_csv << "family,method,schedule,selector,n,K,trials,mean,stderr,"
                 "requirement_met,seed\n";
    for (int K : {8, 16, 32})
        short_csv << "quadratic,random_shuffle,const_quadratic,last,4," << K << ",1,"
                  << 1.0 / (K * K) << ",0,1,1\n";
    write(short_table, short_csv.str());
    const fs::path cfg3 = dir.path / "fit3.cfg";
    write(cfg3, "[output]\n"
                "dir = " + (dir.path / "out").string() + "\n"
                "[fit]\n"
                "input = " + short_table.string() + "\n"
                "axis = K\n"
                "fixed_value = 4\n");
    CHECK(run_cli_command("fit " + cfg3.string()) == 2);
}

TEST_CASE("sweep and report: identical methods give unit ratios and byte-stable csv") {
    TempDir dir("report");
    const fs::path cfg = dir.path / "sweep.cfg";
    write(cfg, "seed = 21\n"
               "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "prefix = sw\n"
               "[problem]\n"
               "family = quadratic\n"
               "d = 2\n"
               "mu = 1.0\n"
               "ell = 2.0\n"
               "[method]\n"
               "strategy = random_shuffle\n"
               "schedule = const_quadratic\n"
               "[grid]\n"
               "n_values = 4\n"
               "K_values = 4, 8\n"
               "trials = 2\n");
    CHECK(run_cli_command("sweep " + cfg.string()) == 0);
    const std::string first = slurp(dir.path / "out" / "sw_rates.csv");
    CHECK(run_cli_command("sweep " + cfg.string()) == 0);
    CHECK(slurp(dir.path / "out" / "sw_rates.csv") == first);  // deterministic bytes

    const fs::path rcfg = dir.path / "report.cfg";
    write(rcfg, "seed = 21\n"
                "[output]\n"
                "dir = " + (dir.path / "out").string() + "\n"
                "prefix = rep\n"
                "[problem]\n"
                "family = quadratic\n"
                "d = 2\n"
                "mu = 1.0\n"
                "ell = 2.0\n"
                "[report]\n"
                "methods = a, b\n"
                "[method.a]\n"
                "strategy = random_shuffle\n"
                "schedule = const_quadratic\n"
                "[method.b]\n"
                "strategy = random_shuffle\n"
                "schedule = const_quadratic\n"
                "[grid]\n"
                "n_values = 4\n"
                "K_values = 4, 8\n"
                "trials = 2\n");
    CHECK(run_cli_command("report " + rcfg.string()) == 0);
    const std::string cmp = slurp(dir.path / "out" / "rep_compare.csv");
    CHECK(cmp.rfind("method,n,K,mean,stderr,ratio_vs_baseline,requirement_met\n", 0) == 0);
    // Identical methods: every ratio field is exactly 1.
    std::istringstream lines(cmp);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto last_comma = line.rfind(',');
        const auto prev_comma = line.rfind(',', last_comma - 1);
        CHECK(line.substr(prev_comma + 1, last_comma - prev_comma - 1) == "1");
    }
    CHECK(rows == 4);  // |grid| x methods
}

TEST_CASE("environment seed overrides the config seed end to end") {
    TempDir dir("envseed");
    const fs::path cfg = dir.path / "run.cfg";
    write(cfg, "seed = 11\n"
               "[output]\n"
               "dir = " + (dir.path / "out").string() + "\n"
               "prefix = env\n"
               "[problem]\n"
               "family = quadratic\n"
               "n = 4\n"
               "d = 2\n"
               "[run]\n"
               "K = 8\n");
    const int status = std::system(("SHUFFLELAB_SEED=4242 " + std::string(cli_path()) + " run " +
                                    cfg.string() + " > /dev/null 2> /dev/null")
                                       .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    const std::string meta = slurp(dir.path / "out" / "env_meta.json");
    CHECK(meta.find("\"seed\": 4242") != std::string::npos);
}

}  // TEST_SUITE
