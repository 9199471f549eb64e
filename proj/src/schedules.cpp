#include "shufflelab/schedules.hpp"

#include <algorithm>
#include <cmath>

namespace shufflelab {

std::string schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::ConstPL: return "const_pl";
        case ScheduleKind::ConstQuadratic: return "const_quadratic";
        case ScheduleKind::ConstTail: return "const_tail";
        case ScheduleKind::ConstSingleShuffle: return "const_singleshuffle";
        case ScheduleKind::VaryingStronglyConvex: return "varying_strongly_convex";
        case ScheduleKind::VaryingQuadratic: return "varying_quadratic";
        case ScheduleKind::SgdBaseline: return "sgd_baseline";
    }
    return "unknown";
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "const_pl") return ScheduleKind::ConstPL;
    if (name == "const_quadratic") return ScheduleKind::ConstQuadratic;
    if (name == "const_tail") return ScheduleKind::ConstTail;
    if (name == "const_singleshuffle") return ScheduleKind::ConstSingleShuffle;
    if (name == "varying_strongly_convex") return ScheduleKind::VaryingStronglyConvex;
    if (name == "varying_quadratic") return ScheduleKind::VaryingQuadratic;
    if (name == "sgd_baseline") return ScheduleKind::SgdBaseline;
    throw BadArgs("unknown schedule: " + name);
}

namespace {

void check_common(double mu, double ell, int n, int K) {
    if (n < 2) throw BadCount("schedule: need n >= 2");
    if (K < 1) throw BadCount("schedule: need K >= 1");
    if (!(mu > 0.0) || !(ell >= mu)) throw BadArgs("schedule: need 0 < mu <= ell");
}

Schedule base(ScheduleKind kind, double mu, double ell, int n, int K) {
    Schedule s;
    s.kind = kind;
    s.mu = mu;
    s.ell = ell;
    s.kappa = ell / mu;
    s.n = n;
    s.K = K;
    return s;
}

}  // namespace

double Schedule::eta(int k, int i) const {
    const double nd = static_cast<double>(n);
    const double Kd = static_cast<double>(K);
    switch (kind) {
        case ScheduleKind::ConstPL:
        case ScheduleKind::ConstSingleShuffle:
            return 2.0 * std::log(std::sqrt(nd) * Kd) / (mu * nd * Kd);
        case ScheduleKind::ConstQuadratic:
            return 2.0 * std::log(nd * Kd) / (mu * nd * Kd);
        case ScheduleKind::ConstTail:
            return 16.0 * std::log(nd * Kd) / (mu * nd * Kd);
        case ScheduleKind::VaryingStronglyConvex:
        case ScheduleKind::VaryingQuadratic:
            if (k == 1) return (2.0 * alpha / mu) / (k0 + static_cast<double>(i));
            return (2.0 * alpha / mu) / (k0 + nd * static_cast<double>(k));
        case ScheduleKind::SgdBaseline: {
            double t = nd * static_cast<double>(k - 1) + static_cast<double>(i);
            return 2.0 / (mu * (t + 4.0 * kappa));
        }
    }
    return 0.0;
}

bool Schedule::requirement(int n_value, int K_value) const {
    const double nd = static_cast<double>(n_value);
    const double Kd = static_cast<double>(K_value);
    switch (kind) {
        case ScheduleKind::ConstPL:
            return Kd >= 10.0 * kappa * std::log(std::sqrt(nd) * Kd);
        case ScheduleKind::ConstQuadratic:
            return Kd >= (32.0 / 3.0) * kappa * std::max(1.0, std::sqrt(kappa / nd)) *
                             std::log(nd * Kd);
        case ScheduleKind::ConstTail:
            return Kd >= 128.0 * kappa * std::max(1.0, std::sqrt(kappa / nd)) *
                             std::log(nd * Kd);
        case ScheduleKind::ConstSingleShuffle:
            return Kd >= 10.0 * kappa * kappa * std::log(std::sqrt(nd) * Kd);
        case ScheduleKind::VaryingStronglyConvex:
        case ScheduleKind::VaryingQuadratic:
        case ScheduleKind::SgdBaseline:
            return true;  // valid for any K >= 1
    }
    return true;
}

Schedule const_pl(double mu, double ell, int n, int K) {
    check_common(mu, ell, n, K);
    return base(ScheduleKind::ConstPL, mu, ell, n, K);
}

Schedule const_quadratic(double mu, double ell, int n, int K) {
    check_common(mu, ell, n, K);
    return base(ScheduleKind::ConstQuadratic, mu, ell, n, K);
}

Schedule const_tail(double mu, double ell, int n, int K) {
    check_common(mu, ell, n, K);
    return base(ScheduleKind::ConstTail, mu, ell, n, K);
}

Schedule const_singleshuffle(double mu, double ell, int n, int K) {
    check_common(mu, ell, n, K);
    return base(ScheduleKind::ConstSingleShuffle, mu, ell, n, K);
}

namespace {

Schedule varying(ScheduleKind kind, double mu, double ell, int n, double alpha,
                 double min_alpha) {
    check_common(mu, ell, n, 1);
    if (!(alpha > min_alpha))
        throw BadAlpha("varying schedule: need alpha > " + std::to_string(min_alpha));
    Schedule s = base(kind, mu, ell, n, 1);
    s.alpha = alpha;
    s.k0 = alpha * s.kappa;
    return s;
}

}  // namespace

Schedule varying_strongly_convex(double mu, double ell, int n, double alpha) {
    return varying(ScheduleKind::VaryingStronglyConvex, mu, ell, n, alpha, 2.0);
}

Schedule varying_quadratic(double mu, double ell, int n, double alpha) {
    return varying(ScheduleKind::VaryingQuadratic, mu, ell, n, alpha, 4.0);
}

Schedule sgd_baseline(double mu, double ell, int n, int K) {
    check_common(mu, ell, n, K);
    return base(ScheduleKind::SgdBaseline, mu, ell, n, K);
}

Schedule make_schedule(ScheduleKind kind, double mu, double ell, int n, int K, double alpha) {
    switch (kind) {
        case ScheduleKind::ConstPL: return const_pl(mu, ell, n, K);
        case ScheduleKind::ConstQuadratic: return const_quadratic(mu, ell, n, K);
        case ScheduleKind::ConstTail: return const_tail(mu, ell, n, K);
        case ScheduleKind::ConstSingleShuffle: return const_singleshuffle(mu, ell, n, K);
        case ScheduleKind::VaryingStronglyConvex: {
            Schedule s = varying_strongly_convex(mu, ell, n, alpha);
            s.K = K;
            return s;
        }
        case ScheduleKind::VaryingQuadratic: {
            Schedule s = varying_quadratic(mu, ell, n, alpha);
            s.K = K;
            return s;
        }
        case ScheduleKind::SgdBaseline: return sgd_baseline(mu, ell, n, K);
    }
    throw BadArgs("make_schedule: unknown kind");
}

}  // namespace shufflelab
