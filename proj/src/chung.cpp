#include "shufflelab/chung.hpp"

#include <cmath>
#include <numbers>

#include "shufflelab/csv.hpp"

namespace shufflelab {

// Margins between extremal runs and closed-form bounds can be small at large
// alpha, so everything internal runs in long double (80-bit on x86-64).
namespace {

void validate_lemma1(const ChungParams& p, bool for_bound) {
    if (!(p.k0 > 0.0)) throw BadParams("chung: k0 must be positive");
    if (!(p.beta > 0.0)) throw BadParams("chung: beta must be positive");
    if (!(p.alpha > p.beta)) throw BadParams("chung: alpha must exceed beta");
    if (p.big_a < 0.0) throw BadParams("chung: A must be nonnegative");
    if (p.xi0 < 0.0) throw BadParams("chung: xi0 must be nonnegative");
    if (for_bound ? p.K < 1 : p.K < 0) throw BadParams("chung: K out of range");
}

void validate_variant(const ChungParams& p) {
    if (!(p.k0 > 0.0)) throw BadParams("chung: k0 must be positive");
    if (!(p.beta > 0.0)) throw BadParams("chung: beta must be positive");
    if (!(p.alpha > p.beta)) throw BadParams("chung: alpha must exceed beta");
    if (p.n < 2) throw BadParams("chung: n must be at least 2");
    if (!(p.eps > 0.0)) throw BadParams("chung: eps must be positive");
    if (p.big_a1 < 0.0 || p.big_a2 < 0.0) throw BadParams("chung: A1, A2 must be nonnegative");
    if (p.xi0 < 0.0) throw BadParams("chung: xi0 must be nonnegative");
    if (p.K < 1) throw BadParams("chung: K must be at least 1");
}

void validate_extended(const ChungParams& p) {
    validate_variant(p);
    if (p.big_a3 < 0.0) throw BadParams("chung: A3 must be nonnegative");
    if (!(p.gamma > 0.0)) throw BadParams("chung: gamma must be positive");
    if (p.gamma >= p.alpha) throw BadParams("chung: gamma must be below alpha");
}

// sum_{i=from}^{to} 1/(k0+i)
long double inverse_sum(long double k0, long from, long to) {
    long double s = 0.0L;
    for (long i = from; i <= to; ++i) s += 1.0L / (k0 + static_cast<long double>(i));
    return s;
}

// Shared epoch-variant recursion; a3 = 0 reproduces the plain variant.
long double variant_recursion(const ChungParams& p, long double a3_amplitude) {
    const long double k0 = p.k0, alpha = p.alpha, beta = p.beta, eps = p.eps;
    const long double n = static_cast<long double>(p.n);
    long double xi = static_cast<long double>(p.xi0);
    // First epoch: xi_1 = exp(-alpha sum_{i=1}^n 1/(k0+i)) xi_0 + A1.
    xi = std::exp(-alpha * inverse_sum(k0, 1, p.n)) * xi + static_cast<long double>(p.big_a1);
    for (long k = 1; k < p.K; ++k) {
        const long double kk = static_cast<long double>(k);
        const long double factor =
            std::exp(-alpha * inverse_sum(k0 + n * kk, 1, p.n) + eps / (kk * kk));
        const long double next_index = k0 + n * (kk + 1.0L);
        xi = factor * xi + static_cast<long double>(p.big_a2) / std::pow(next_index, beta + 1.0L) +
             a3_amplitude / std::pow(next_index, static_cast<long double>(p.gamma) + 1.0L);
    }
    return xi;
}

// Bound terms shared between the variant and extended variant.
long double variant_bound_core(const ChungParams& p, long double& c, long double& exp_head) {
    const long double k0 = p.k0, alpha = p.alpha, beta = p.beta;
    const long double n = static_cast<long double>(p.n);
    const long double horizon = k0 + n * static_cast<long double>(p.K);
    c = std::exp(static_cast<long double>(p.eps) * std::numbers::pi_v<long double> *
                 std::numbers::pi_v<long double> / 6.0L);
    exp_head = std::exp(alpha / (k0 + n + 1.0L));
    const long double lead = c * std::pow((k0 + 1.0L) / horizon, alpha) *
                             static_cast<long double>(p.xi0);
    const long double first_epoch = c * std::pow((k0 + n + 1.0L) / horizon, alpha) *
                                    static_cast<long double>(p.big_a1);
    const long double noise_main = (c / (alpha - beta)) * exp_head *
                                   static_cast<long double>(p.big_a2) /
                                   (n * std::pow(horizon, beta));
    const long double noise_tail = c * exp_head * static_cast<long double>(p.big_a2) /
                                   std::pow(horizon, beta + 1.0L);
    return lead + first_epoch + noise_main + noise_tail;
}

}  // namespace

std::string chung_lemma_name(ChungLemma lemma) {
    switch (lemma) {
        case ChungLemma::Lemma1: return "lemma1";
        case ChungLemma::Variant: return "variant";
        case ChungLemma::Extended: return "extended";
    }
    return "unknown";
}

std::string chung_params_string(const ChungParams& p, ChungLemma lemma) {
    std::string s = "k0=" + csv_double(p.k0) + ";alpha=" + csv_double(p.alpha) +
                    ";beta=" + csv_double(p.beta) + ";xi0=" + csv_double(p.xi0) +
                    ";K=" + std::to_string(p.K);
    if (lemma == ChungLemma::Lemma1) return s + ";A=" + csv_double(p.big_a);
    s += ";n=" + std::to_string(p.n) + ";eps=" + csv_double(p.eps) +
         ";A1=" + csv_double(p.big_a1) + ";A2=" + csv_double(p.big_a2);
    if (lemma == ChungLemma::Extended)
        s += ";A3=" + csv_double(p.big_a3) + ";gamma=" + csv_double(p.gamma);
    return s;
}

ChungBound1 chung_bound_1(const ChungParams& p) {
    validate_lemma1(p, /*for_bound=*/true);
    const long double k0 = p.k0, alpha = p.alpha, beta = p.beta;
    const long double horizon = k0 + static_cast<long double>(p.K);
    const long double exp_head = std::exp(alpha / (k0 + 1.0L));
    const long double noise_main = (1.0L / (alpha - beta)) * exp_head *
                                   static_cast<long double>(p.big_a) / std::pow(horizon, beta);
    const long double noise_tail = exp_head * static_cast<long double>(p.big_a) /
                                   std::pow(horizon, beta + 1.0L);
    const long double lead_sharp =
        std::exp(-alpha * inverse_sum(k0, 1, p.K)) * static_cast<long double>(p.xi0);
    const long double lead_loose =
        std::pow((k0 + 1.0L) / horizon, alpha) * static_cast<long double>(p.xi0);
    ChungBound1 bound;
    bound.sharp = static_cast<double>(lead_sharp + noise_main + noise_tail);
    bound.loose = static_cast<double>(lead_loose + noise_main + noise_tail);
    return bound;
}

double chung_extremal_1(const ChungParams& p) {
    validate_lemma1(p, /*for_bound=*/false);
    const long double k0 = p.k0, alpha = p.alpha, beta = p.beta;
    long double xi = static_cast<long double>(p.xi0);
    for (long k = 0; k < p.K; ++k) {
        const long double index = k0 + static_cast<long double>(k) + 1.0L;
        xi = std::exp(-alpha / index) * xi +
             static_cast<long double>(p.big_a) / std::pow(index, beta + 1.0L);
    }
    return static_cast<double>(xi);
}

double chung_bound_2(const ChungParams& p) {
    validate_variant(p);
    long double c = 0.0L, exp_head = 0.0L;
    return static_cast<double>(variant_bound_core(p, c, exp_head));
}

double chung_extremal_2(const ChungParams& p) {
    validate_variant(p);
    return static_cast<double>(variant_recursion(p, 0.0L));
}

double chung_bound_2ext(const ChungParams& p) {
    validate_extended(p);
    long double c = 0.0L, exp_head = 0.0L;
    const long double core = variant_bound_core(p, c, exp_head);
    const long double alpha = p.alpha, gamma = p.gamma;
    const long double n = static_cast<long double>(p.n);
    const long double horizon = static_cast<long double>(p.k0) + n * static_cast<long double>(p.K);
    const long double extra_main = (c / (alpha - gamma)) * exp_head *
                                   static_cast<long double>(p.big_a3) /
                                   (n * std::pow(horizon, gamma));
    const long double extra_tail = c * exp_head * static_cast<long double>(p.big_a3) /
                                   std::pow(horizon, gamma + 1.0L);
    return static_cast<double>(core + extra_main + extra_tail);
}

double chung_extremal_2ext(const ChungParams& p) {
    validate_extended(p);
    return static_cast<double>(variant_recursion(p, static_cast<long double>(p.big_a3)));
}

ChungRow chung_check(const ChungParams& params, ChungLemma lemma) {
    ChungRow row;
    row.lemma = chung_lemma_name(lemma);
    row.params = chung_params_string(params, lemma);
    switch (lemma) {
        case ChungLemma::Lemma1:
            row.xi_K = chung_extremal_1(params);
            row.bound = chung_bound_1(params).sharp;
            break;
        case ChungLemma::Variant:
            row.xi_K = chung_extremal_2(params);
            row.bound = chung_bound_2(params);
            break;
        case ChungLemma::Extended:
            row.xi_K = chung_extremal_2ext(params);
            row.bound = chung_bound_2ext(params);
            break;
    }
    row.margin = row.bound - row.xi_K;
    return row;
}

std::string chung_rows_to_csv(const std::vector<ChungRow>& rows) {
    CsvWriter csv("lemma,params,xi_K,bound,margin");
    for (const auto& row : rows) {
        csv.field(row.lemma).field(row.params).field(row.xi_K).field(row.bound).field(row.margin);
        csv.end_row();
    }
    return csv.str();
}

namespace {

// Adaptive Simpson quadrature with absolute tolerance `tol`.
double simpson_slice(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (fa + 4.0 * f(m) + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double left = (m - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + m)) + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * f(0.5 * (m + b)) + fb);
    if (depth > 48 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, fa, m, fm, left, 0.5 * tol, depth + 1) +
           adaptive_step(f, m, fm, b, fb, right, 0.5 * tol, depth + 1);
}

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol) {
    const double fa = f(a), fb = f(b);
    return adaptive_step(f, a, fa, b, fb, simpson_slice(f, a, fa, b, fb), tol, 0);
}

}  // namespace

IntegralCheckReport integral_approx_check(const std::function<double(double)>& f, long m, long n,
                                          std::function<double(double)> antiderivative) {
    if (m < 1 || n <= m) throw BadArgs("integral_approx_check: need integers 1 <= m < n");
    if (!f) throw BadArgs("integral_approx_check: empty function");

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n - m + 1));
    long double sum = 0.0L;
    for (long i = m; i <= n; ++i) {
        const double v = f(static_cast<double>(i));
        if (!std::isfinite(v)) throw NonFinite("integral_approx_check: f not finite on grid");
        values.push_back(v);
        sum += v;
    }
    // Monotonicity as visible on the integer grid; ties allowed.
    bool non_decreasing = true, non_increasing = true;
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] < values[j - 1]) non_decreasing = false;
        if (values[j] > values[j - 1]) non_increasing = false;
    }
    if (!non_decreasing && !non_increasing)
        throw BadArgs("integral_approx_check: f is not monotone on the integer grid");

    IntegralCheckReport report;
    report.non_decreasing = non_decreasing;
    report.sum = static_cast<double>(sum);
    report.integral = antiderivative
                          ? antiderivative(static_cast<double>(n)) -
                                antiderivative(static_cast<double>(m))
                          : adaptive_quadrature(f, static_cast<double>(m),
                                                static_cast<double>(n), 1e-12);
    const double f_first = values.front();
    const double f_last = values.back();
    if (non_decreasing) {
        report.lower = report.integral + f_first;
        report.upper = report.integral + f_last;
    } else {
        report.lower = report.integral + f_last;
        report.upper = report.integral + f_first;
    }
    constexpr double tol = 1e-10;
    report.passed = report.lower <= report.sum + tol && report.sum <= report.upper + tol;
    return report;
}

}  // namespace shufflelab
