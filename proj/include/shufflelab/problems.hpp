#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "shufflelab/types.hpp"

namespace shufflelab {

// One summand f_i(x) = 0.5 x^T A_i x + b_i^T x of a finite-sum quadratic.
struct QuadraticComponent {
    Matrix A;  // symmetric, ||A_i|| <= L; PSD only when convex components requested
    Vector b;
};

struct QuadraticProblem {
    std::vector<QuadraticComponent> components;
    int d = 0;
    double mu = 0.0;     // lambda_min of the mean Hessian
    double ell = 0.0;    // smoothness bound L
    double big_g = 0.0;  // max_i ||b_i||
    double kappa = 1.0;  // L / mu
    bool convex_components = false;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(components.size()); }
    Matrix mean_hessian() const;
    Vector mean_linear() const;
    // F(x) - F*; the optimum is pinned at the origin with F* = 0.
    double objective(const Vector& x) const;
    Vector component_gradient(int i, const Vector& x) const;
};

// Scalar nonconvex family: F(x) = x^2 + 3 sin^2 x, components
// f_i(x) = F(x) + c_i sin x with sum c_i = 0, so (1/n) sum f_i = F exactly.
struct PLProblem {
    int n = 0;
    std::vector<double> c;   // zero-sum perturbation weights
    double mu_pl = 0.0;      // certified PL constant of F
    double ell = 0.0;        // 2 + 6 + max|c_i|
    double big_g = 0.0;      // gradient bound on the F(x0)-sublevel set, x0 = 1 reference
    std::uint64_t seed = 0;

    static double base_value(double x) { return x * x + 3.0 * std::sin(x) * std::sin(x); }
    static double base_derivative(double x) { return 2.0 * x + 3.0 * std::sin(2.0 * x); }
    double objective(double x) const { return base_value(x); }
    double component_derivative(int i, double x) const {
        return base_derivative(x) + c[static_cast<std::size_t>(i)] * std::cos(x);
    }
};

// n >= 2, d >= 1. Mean Hessian has lambda_min = mu exactly by construction and
// lambda_max <= ell; deviations are zero-sum symmetric matrices, optionally
// PSD-projected; linear terms are zero-sum with max norm g_target.
QuadraticProblem gen_quadratic(int n, int d, double mu, double ell, double noise_scale,
                               bool convex_components, std::uint64_t seed,
                               double g_target = 1.0);

// c_i uniform in [-perturb_scale, perturb_scale] with c_n = -sum of the rest;
// mu_pl certified by grid minimization over [-20, 20] at step 1e-4.
PLProblem gen_pl(int n, double perturb_scale, std::uint64_t seed);

// max over the F(x0)-sublevel interval (bisection on F) and over i of |f_i'|,
// evaluated on a grid of step 1e-3, inflated by 5%.
double sublevel_gradient_bound(const PLProblem& problem, double x0);

// Certified PL constant of the base cost alone (grid minimum of
// F'(x)^2 / (2 (F(x)-F*)) over [-20, 20], step 1e-4); exposed for tests.
double pl_grid_constant();

// Uniform view over both families for the optimizer and sweeps. Immutable and
// cheap to copy; safe to share across workers.
class ProblemHandle {
public:
    ProblemHandle(QuadraticProblem problem);
    // x0 fixes the sublevel set on which the gradient bound G is certified.
    ProblemHandle(PLProblem problem, double x0);

    int n() const;
    int dimension() const;
    Vector component_gradient(int i, const Vector& x) const;
    double objective(const Vector& x) const;  // already normalized: F(x) - F*
    double optimum_value() const { return 0.0; }
    double distance_to_solution_set(const Vector& x) const;

    double mu() const;     // mu for quadratics, mu_PL for the PL family
    double ell() const;
    double big_g() const;
    double kappa() const { return ell() / mu(); }

    bool is_quadratic() const { return quadratic_ != nullptr; }
    const QuadraticProblem& quadratic() const;
    const PLProblem& pl() const;
    std::string family() const { return quadratic_ ? "quadratic" : "pl"; }

private:
    std::shared_ptr<const QuadraticProblem> quadratic_;
    std::shared_ptr<const PLProblem> pl_;
    Matrix mean_A_;   // cached for fast objective evaluation
    Vector mean_b_;
    double pl_big_g_ = 0.0;
};

// JSON snapshot (fields {family, n, d, matrices, vectors, constants, seed});
// numbers round-trip bit-exactly.
std::string problem_to_json(const QuadraticProblem& problem);
std::string problem_to_json(const PLProblem& problem);
QuadraticProblem quadratic_from_json(const std::string& text);
PLProblem pl_from_json(const std::string& text);

// FNV-1a hash of the JSON form; used to tag trajectory CSV headers.
std::uint64_t fnv1a(const std::string& bytes);
std::string problem_hash(const ProblemHandle& handle);

}  // namespace shufflelab
