#include "shufflelab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "shufflelab/rng.hpp"

namespace shufflelab {

using json = nlohmann::json;

Matrix QuadraticProblem::mean_hessian() const {
    Matrix mean = Matrix::Zero(d, d);
    for (const auto& comp : components) mean += comp.A;
    return mean / static_cast<double>(n());
}

Vector QuadraticProblem::mean_linear() const {
    Vector mean = Vector::Zero(d);
    for (const auto& comp : components) mean += comp.b;
    return mean / static_cast<double>(n());
}

double QuadraticProblem::objective(const Vector& x) const {
    Matrix mean = mean_hessian();
    Vector meanb = mean_linear();
    return 0.5 * x.dot(mean * x) + meanb.dot(x);
}

Vector QuadraticProblem::component_gradient(int i, const Vector& x) const {
    const auto& comp = components[static_cast<std::size_t>(i)];
    return comp.A * x + comp.b;
}

namespace {

// Largest c in [0, 1] with ||A + c E|| <= ell for every deviation, found by
// bisection on the (continuous, nondecreasing in c) max spectral norm.
double common_deviation_scale(const Matrix& A, const std::vector<Matrix>& devs, double ell) {
    auto max_norm = [&](double c) {
        double worst = 0.0;
        for (const auto& E : devs) worst = std::max(worst, spectral_norm(A + c * E));
        return worst;
    };
    const double slack = 1e-12;
    if (max_norm(1.0) <= ell + slack) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 80; ++iter) {
        double mid = 0.5 * (lo + hi);
        (max_norm(mid) <= ell + slack ? lo : hi) = mid;
    }
    return lo;
}

Matrix psd_projection(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    Vector clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

QuadraticProblem gen_quadratic(int n, int d, double mu, double ell, double noise_scale,
                               bool convex_components, std::uint64_t seed, double g_target) {
    if (d < 1 || n < 2) throw BadDimension("gen_quadratic: need d >= 1 and n >= 2");
    if (d > kMaxDimension) throw BadDimension("gen_quadratic: d exceeds 16");
    if (!(mu > 0.0) || !(ell >= mu)) throw BadArgs("gen_quadratic: need 0 < mu <= ell");
    if (noise_scale < 0.0 || g_target < 0.0)
        throw BadArgs("gen_quadratic: negative noise_scale or g_target");
    if (d == 1) ell = mu;  // a 1x1 mean cannot hold two distinct eigenvalues

    Matrix A = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j)
        A(j, j) = d == 1 ? mu : mu + (ell - mu) * static_cast<double>(j) / (d - 1);

    const double eig_tol = 1e-9;
    const int max_retries = 64;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        SplitMix64 rng(sub_seed(seed, static_cast<std::uint64_t>(attempt)));

        // Zero-sum symmetric deviations on the orthogonal complement of the top
        // eigendirection (the last coordinate). Leaving the lambda_max = ell
        // direction untouched gives the norm cap below real headroom: the cap
        // can hold for every component while still allowing indefinite ones.
        const int block = d - 1;
        std::vector<Matrix> devs(static_cast<std::size_t>(n), Matrix::Zero(d, d));
        for (int i = 0; i + 1 < n; ++i) {
            Matrix raw = Matrix::Zero(d, d);
            for (int r = 0; r < block; ++r)
                for (int c = 0; c < block; ++c) raw(r, c) = rng.normal();
            Matrix sym = noise_scale * 0.5 * (raw + raw.transpose());
            devs[static_cast<std::size_t>(i)] = sym;
            devs[static_cast<std::size_t>(n - 1)] -= sym;
        }

        // One shared factor keeps sum E_i = 0, hence lambda_min(mean A) = mu.
        double c = noise_scale > 0.0 ? common_deviation_scale(A, devs, ell) : 0.0;

        QuadraticProblem problem;
        problem.d = d;
        problem.mu = mu;
        problem.ell = ell;
        problem.kappa = ell / mu;
        problem.convex_components = convex_components;
        problem.seed = seed;
        problem.components.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            problem.components[static_cast<std::size_t>(i)].A =
                A + c * devs[static_cast<std::size_t>(i)];

        if (convex_components) {
            Matrix correction = Matrix::Zero(d, d);  // sum of projection shifts
            for (int i = 0; i + 1 < n; ++i) {
                Matrix& Ai = problem.components[static_cast<std::size_t>(i)].A;
                Matrix projected = psd_projection(Ai);
                correction += projected - Ai;
                Ai = projected;
            }
            Matrix& last = problem.components[static_cast<std::size_t>(n - 1)].A;
            last -= correction;  // re-enforce sum A_i = n A
            bool ok = min_eigenvalue(last) >= -eig_tol;
            for (const auto& comp : problem.components)
                ok = ok && spectral_norm(comp.A) <= ell + eig_tol &&
                     min_eigenvalue(comp.A) >= -eig_tol;
            if (!ok) continue;  // fresh draw
        }

        // Zero-sum linear terms scaled so max ||b_i|| = g_target.
        Vector sum = Vector::Zero(d);
        for (int i = 0; i + 1 < n; ++i) {
            Vector raw(d);
            double r2;
            do {
                for (int j = 0; j < d; ++j) raw[j] = rng.uniform(-1.0, 1.0);
                r2 = raw.squaredNorm();
            } while (r2 > 1.0 || r2 == 0.0);
            problem.components[static_cast<std::size_t>(i)].b = raw;
            sum += raw;
        }
        problem.components[static_cast<std::size_t>(n - 1)].b = -sum;
        double max_norm = 0.0;
        for (const auto& comp : problem.components)
            max_norm = std::max(max_norm, comp.b.norm());
        if (g_target > 0.0 && max_norm > 0.0) {
            double scale = g_target / max_norm;
            for (auto& comp : problem.components) comp.b *= scale;
            problem.big_g = g_target;
        } else {
            for (auto& comp : problem.components) comp.b.setZero();
            problem.big_g = 0.0;
        }

        // Re-verify the mean-spectrum invariants before handing it out.
        Matrix mean = problem.mean_hessian();
        if (std::abs(min_eigenvalue(mean) - mu) > eig_tol) continue;
        if (max_eigenvalue(mean) > ell + eig_tol) continue;
        return problem;
    }
    throw InfeasibleSpec("gen_quadratic: invariants failed after retries; "
                         "mu/ell/noise_scale are incompatible");
}

PLProblem gen_pl(int n, double perturb_scale, std::uint64_t seed) {
    if (n < 2) throw BadCount("gen_pl: need n >= 2");
    if (perturb_scale < 0.0) throw BadArgs("gen_pl: negative perturb_scale");
    PLProblem problem;
    problem.n = n;
    problem.seed = seed;
    problem.c.resize(static_cast<std::size_t>(n));
    SplitMix64 rng(seed);
    double sum = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        double ci = rng.uniform(-perturb_scale, perturb_scale);
        problem.c[static_cast<std::size_t>(i)] = ci;
        sum += ci;
    }
    problem.c[static_cast<std::size_t>(n - 1)] = -sum;
    double cmax = 0.0;
    for (double ci : problem.c) cmax = std::max(cmax, std::abs(ci));
    problem.ell = 2.0 + 6.0 + cmax;
    problem.mu_pl = pl_grid_constant();
    problem.big_g = sublevel_gradient_bound(problem, 1.0);
    return problem;
}

double pl_grid_constant() {
    // F attains its minimum 0 only at x = 0; the quadratic term dominates
    // outside [-20, 20], so the grid minimum certifies the PL constant.
    double best = std::numeric_limits<double>::infinity();
    const double step = 1e-4;
    const long points = 400000;
    for (long j = 0; j <= points; ++j) {
        double x = -20.0 + static_cast<double>(j) * step;
        double value = PLProblem::base_value(x);
        if (value <= 1e-300) continue;
        double slope = PLProblem::base_derivative(x);
        best = std::min(best, slope * slope / (2.0 * value));
    }
    return best;
}

double sublevel_gradient_bound(const PLProblem& problem, double x0) {
    // F is even and strictly increasing on [0, inf), so the F(x0)-sublevel set
    // is the interval [-r, r] with F(r) = F(x0); locate r by bisection.
    const double level = PLProblem::base_value(x0);
    double lo = 0.0, hi = std::abs(x0) + 1.0;
    while (PLProblem::base_value(hi) < level) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        (PLProblem::base_value(mid) <= level ? lo : hi) = mid;
    }
    const double radius = hi;

    double worst = 0.0;
    const double step = 1e-3;
    long points = static_cast<long>(std::ceil(2.0 * radius / step));
    for (long j = 0; j <= points; ++j) {
        double x = std::min(-radius + static_cast<double>(j) * step, radius);
        double base = PLProblem::base_derivative(x);
        double cosx = std::cos(x);
        for (double ci : problem.c)
            worst = std::max(worst, std::abs(base + ci * cosx));
    }
    return worst * 1.05;
}

ProblemHandle::ProblemHandle(QuadraticProblem problem)
    : quadratic_(std::make_shared<const QuadraticProblem>(std::move(problem))) {
    mean_A_ = quadratic_->mean_hessian();
    mean_b_ = quadratic_->mean_linear();
}

ProblemHandle::ProblemHandle(PLProblem problem, double x0)
    : pl_(std::make_shared<const PLProblem>(std::move(problem))) {
    pl_big_g_ = sublevel_gradient_bound(*pl_, x0);
}

int ProblemHandle::n() const { return quadratic_ ? quadratic_->n() : pl_->n; }

int ProblemHandle::dimension() const { return quadratic_ ? quadratic_->d : 1; }

Vector ProblemHandle::component_gradient(int i, const Vector& x) const {
    if (quadratic_) return quadratic_->component_gradient(i, x);
    Vector g(1);
    g[0] = pl_->component_derivative(i, x[0]);
    return g;
}

double ProblemHandle::objective(const Vector& x) const {
    if (quadratic_) return 0.5 * x.dot(mean_A_ * x) + mean_b_.dot(x);
    return pl_->objective(x[0]);
}

double ProblemHandle::distance_to_solution_set(const Vector& x) const {
    // Both families are normalized so the solution set is the origin.
    return x.norm();
}

double ProblemHandle::mu() const { return quadratic_ ? quadratic_->mu : pl_->mu_pl; }
double ProblemHandle::ell() const { return quadratic_ ? quadratic_->ell : pl_->ell; }
double ProblemHandle::big_g() const { return quadratic_ ? quadratic_->big_g : pl_big_g_; }

const QuadraticProblem& ProblemHandle::quadratic() const {
    if (!quadratic_) throw BadArgs("handle does not hold a quadratic problem");
    return *quadratic_;
}

const PLProblem& ProblemHandle::pl() const {
    if (!pl_) throw BadArgs("handle does not hold a PL problem");
    return *pl_;
}

std::string problem_to_json(const QuadraticProblem& problem) {
    json doc;
    doc["family"] = "quadratic";
    doc["n"] = problem.n();
    doc["d"] = problem.d;
    json matrices = json::array();
    json vectors = json::array();
    for (const auto& comp : problem.components) {
        json flat = json::array();  // row-major
        for (int r = 0; r < problem.d; ++r)
            for (int c = 0; c < problem.d; ++c) flat.push_back(comp.A(r, c));
        matrices.push_back(flat);
        json vec = json::array();
        for (int r = 0; r < problem.d; ++r) vec.push_back(comp.b[r]);
        vectors.push_back(vec);
    }
    doc["matrices"] = matrices;
    doc["vectors"] = vectors;
    doc["constants"] = {{"mu", problem.mu},
                        {"ell", problem.ell},
                        {"big_g", problem.big_g},
                        {"kappa", problem.kappa},
                        {"convex_components", problem.convex_components}};
    doc["seed"] = problem.seed;
    return doc.dump(2) + "\n";
}

std::string problem_to_json(const PLProblem& problem) {
    json doc;
    doc["family"] = "pl";
    doc["n"] = problem.n;
    doc["d"] = 1;
    doc["matrices"] = json::array();
    doc["vectors"] = {problem.c};
    doc["constants"] = {{"mu_pl", problem.mu_pl},
                        {"ell", problem.ell},
                        {"big_g", problem.big_g}};
    doc["seed"] = problem.seed;
    return doc.dump(2) + "\n";
}

QuadraticProblem quadratic_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("family") != "quadratic") throw BadArgs("problem JSON is not quadratic");
    QuadraticProblem problem;
    int n = doc.at("n").get<int>();
    problem.d = doc.at("d").get<int>();
    problem.components.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& comp = problem.components[static_cast<std::size_t>(i)];
        comp.A = Matrix(problem.d, problem.d);
        const auto& flat = doc.at("matrices").at(static_cast<std::size_t>(i));
        for (int r = 0; r < problem.d; ++r)
            for (int c = 0; c < problem.d; ++c)
                comp.A(r, c) = flat.at(static_cast<std::size_t>(r * problem.d + c)).get<double>();
        comp.b = Vector(problem.d);
        const auto& vec = doc.at("vectors").at(static_cast<std::size_t>(i));
        for (int r = 0; r < problem.d; ++r) comp.b[r] = vec.at(static_cast<std::size_t>(r)).get<double>();
    }
    const auto& constants = doc.at("constants");
    problem.mu = constants.at("mu").get<double>();
    problem.ell = constants.at("ell").get<double>();
    problem.big_g = constants.at("big_g").get<double>();
    problem.kappa = constants.at("kappa").get<double>();
    problem.convex_components = constants.at("convex_components").get<bool>();
    problem.seed = doc.at("seed").get<std::uint64_t>();
    return problem;
}

PLProblem pl_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("family") != "pl") throw BadArgs("problem JSON is not pl");
    PLProblem problem;
    problem.n = doc.at("n").get<int>();
    problem.c = doc.at("vectors").at(0).get<std::vector<double>>();
    const auto& constants = doc.at("constants");
    problem.mu_pl = constants.at("mu_pl").get<double>();
    problem.ell = constants.at("ell").get<double>();
    problem.big_g = constants.at("big_g").get<double>();
    problem.seed = doc.at("seed").get<std::uint64_t>();
    return problem;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string problem_hash(const ProblemHandle& handle) {
    std::string text = handle.is_quadratic() ? problem_to_json(handle.quadratic())
                                             : problem_to_json(handle.pl());
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

}  // namespace shufflelab
