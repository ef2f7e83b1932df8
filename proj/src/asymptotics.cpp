#include "matchstat/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matchstat {

double edge_scale_a(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.5))
        throw RangeError("edge_scale_a defined for gamma in (0, 1.5)");
    const double d = gamma - 1.0;
    if (std::fabs(d) < 1e-4) return 2.0 * d - d * d / 15.0;
    if (gamma >= 1.0) {
        const double root = std::sqrt(gamma * gamma - 1.0);
        return std::pow(3.0 * (gamma * std::log(gamma + root) - root), 2.0 / 3.0);
    }
    const double root = std::sqrt(1.0 - gamma * gamma);
    return -std::pow(3.0 * (root - gamma * std::acos(gamma)), 2.0 / 3.0);
}

double painleve_scale_s(double gamma, double t) {
    return std::cbrt(t * t) * edge_scale_a(gamma);
}

int level_j(double t, double x) {
    return static_cast<int>(std::floor(t + 0.5 * x * std::cbrt(t)));
}

int level_ell(double t, double x) {
    return static_cast<int>(std::floor(2.0 * t + x * std::cbrt(t)));
}

ScalingPoint make_scaling_point(double t, double x, double xp) {
    if (!(t > 0)) throw ValidationError("scaling point needs t > 0");
    ScalingPoint p;
    p.t = t;
    p.x = x;
    p.xp = xp;
    p.j = level_j(t, x);
    p.k = level_j(t, xp);
    const double cbrt_t = std::cbrt(t);
    p.x_t = (2.0 * p.j + 1.0 - 2.0 * t) / cbrt_t;
    p.x_t_prime = (2.0 * p.k + 1.0 - 2.0 * t) / cbrt_t;
    p.x_super = (level_ell(t, x) - 2.0 * t) / cbrt_t;
    p.gamma = (2.0 * p.j + 1.0) / (2.0 * t);
    p.gamma_tilde = (2.0 * p.k + 1.0) / (2.0 * t);
    p.s = painleve_scale_s(p.gamma, t);
    p.s_tilde = painleve_scale_s(p.gamma_tilde, t);
    return p;
}

double marginal_expansion(const HmSolution& hm, double t, double x) {
    const ScalingPoint p = make_scaling_point(t, x, x);
    const double correction =
        (4.0 * hm.pdf_prime(Ensemble::GOE, x) + x * x * hm.pdf(Ensemble::GOE, x) / 3.0) /
        (20.0 * std::cbrt(t * t));
    return hm.cdf(Ensemble::GOE, p.x_t) - correction;
}

double lis_expansion(const HmSolution& hm, double t, double x) {
    const ScalingPoint p = make_scaling_point(t, x, x);
    const double correction =
        (hm.pdf_prime(Ensemble::GUE, x) + x * x * hm.pdf(Ensemble::GUE, x) / 6.0) /
        (10.0 * std::cbrt(t * t));
    return hm.cdf(Ensemble::GUE, p.x_super) - correction;
}

double joint_leading_correction(const HmSolution& hm, double t, double x, double xp) {
    return hm.pdf(Ensemble::GOE, x) * hm.pdf(Ensemble::GOE, xp) / std::cbrt(t * t);
}

double reflection_continuous(double t, int n, long tol_bits) {
    OpucSequence seq = levinson_certified(MeasureKind::Continuous, 0, t, n, tol_bits);
    return seq.reflection[n].to_double();
}

double reflection_discrete(double t, int n, int m, long tol_bits) {
    OpucSequence seq = levinson_certified(MeasureKind::Discrete, m, t, n, tol_bits);
    return seq.reflection[n].to_double();
}

double prop62_residual(const HmSolution& hm, double t, int n, int m, long tol_bits) {
    const double lhs = reflection_discrete(t, n, m, tol_bits);
    OpucSequence cont =
        levinson_certified(MeasureKind::Continuous, 0, t, std::max(n, 2 * m - n), tol_bits);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double pi_n = cont.reflection[n].to_double();
    const double pi_mirror = cont.reflection[2 * m - n].to_double();
    const double s = painleve_scale_s(n / (2.0 * t), t);
    const double s_tilde = painleve_scale_s((2.0 * m - n) / (2.0 * t), t);
    const double rhs = pi_n - sign * pi_mirror +
                       (pair_g1(hm, s, s_tilde) - sign * pair_g2(hm, s, s_tilde)) / t;
    return std::fabs(lhs - rhs);
}

double prop63_residual(const HmSolution& hm, double t, int n, long tol_bits) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double lhs = sign * reflection_continuous(t, n, tol_bits);
    const double gamma = n / (2.0 * t);
    const double s = painleve_scale_s(gamma, t);
    const double rhs = hm.q_at(s) * (1.0 - (gamma - 1.0) / 30.0) / std::cbrt(t) +
                       correction_h(hm, s) / t;
    return std::fabs(lhs - rhs);
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 2) throw ValidationError("fit_decay needs at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, r] : series) {
        if (r == 0.0) throw DegenerateFitError("residual is exactly 0; no decay rate to fit");
        if (!(t > 0) || !(r > 0))
            throw ValidationError("fit_decay needs positive t and |residual|");
        const double x = std::log(t), y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(series.size());
    DecayFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// ---------------------------------------------------------------------------
// Poissonized covariance

namespace {

// log of the crossing-count tail bound P{X >= k} <= t^{2k}/(2k)!
double log_tail_bound(double t, int k) {
    return 2.0 * k * std::log(t) - std::lgamma(2.0 * k + 1.0);
}

// Rigorous bound on the covariance mass outside the [0,K]^2 box.
double box_remainder(double t, int K) {
    const double r = t * t / ((2.0 * K + 5.0) * (2.0 * K + 6.0));
    if (r >= 0.5) return HUGE_VAL;
    const double head = std::exp(log_tail_bound(t, K + 2));
    const double strip = head / (1.0 - r);                          // sum_{k>K} P{X>k}
    const double corner = std::exp(0.5 * log_tail_bound(t, K + 2)) / (1.0 - std::sqrt(r));
    return 2.0 * (K + 1.0) * strip + corner * corner;
}

// log H_j along j = 0..jmax from one reflection sequence.
std::vector<BigReal> log_th_prefix(const OpucSequence& seq, int jmax, mpfr_prec_t wp) {
    std::vector<BigReal> out;
    out.reserve(jmax + 1);
    BigReal acc(0.0, wp);
    const BigReal one(1.0, wp);
    out.push_back(acc);
    for (int j = 1; j <= jmax; j++) {
        acc += log(seq.norm[2 * j]);
        acc -= log(one - seq.reflection[2 * j]);
        out.push_back(acc);
    }
    return out;
}

double covariance_at_prec(double t, int K, mpfr_prec_t wp) {
    const BigReal t_big(t, wp);
    const BigReal log_poisson_zero = -ldexp2(t_big * t_big, -1);  // -t^2/2

    // marginals P{X <= k}, k = 0..K (continuous measure)
    OpucSequence cont = levinson(MeasureKind::Continuous, 0, BigReal(t, wp), 2 * K, wp);
    std::vector<BigReal> log_h = log_th_prefix(cont, K, wp);
    std::vector<BigReal> marg;
    marg.reserve(K + 1);
    for (int k = 0; k <= K; k++) marg.push_back(exp(log_poisson_zero + log_h[k]));

    // joint antidiagonals m = j + k + 1; partials kept per-m and reduced in
    // fixed order (big-float addition is rounded, so order must not depend
    // on the schedule)
    std::vector<BigReal> partial(2 * K + 2, BigReal(wp));
#pragma omp parallel for schedule(dynamic)
    for (int m = 2; m <= 2 * K + 1; m++) {
        const int j_lo = std::max(1, m - 1 - K);
        const int j_hi = std::min(K, m - 1);
        if (j_lo > j_hi) continue;
        OpucSequence seq = levinson(MeasureKind::Discrete, m, BigReal(t, wp), 2 * j_hi, wp);
        std::vector<BigReal> log_hj = log_th_prefix(seq, j_hi, wp);
        BigReal acc(0.0, wp);
        for (int j = j_lo; j <= j_hi; j++) {
            const int k = m - 1 - j;
            BigReal joint = exp(log_poisson_zero + log_hj[j]);
            acc += joint - marg[k] * marg[j];
        }
        partial[m] = std::move(acc);
    }

    BigReal cov(0.0, wp);
    for (const BigReal& p : partial) cov += p;
    // k = 0 column and j = 0 row: the joint value is P{N = 0} = e^{-t^2/2}
    const BigReal one(1.0, wp);
    BigReal edge(0.0, wp);
    for (int j = 1; j <= K; j++) edge += one - marg[j];
    cov += marg[0] * ldexp2(edge, 1);
    cov += marg[0] - marg[0] * marg[0];  // (0,0) cell
    return cov.to_double();
}

}  // namespace

CovarianceResult poissonized_covariance(double t, long tol_bits) {
    if (!(t > 0)) throw ValidationError("poissonized_covariance needs t > 0");
    if (t > 60) throw PrecisionError("poissonized_covariance capped at t = 60");

    const double tol = std::ldexp(1.0, -static_cast<int>(tol_bits));
    int K = static_cast<int>(std::ceil(t + 8.0 * std::cbrt(t))) + 6;
    while (box_remainder(t, K) > tol) {
        K += std::max(2, K / 8);
        if (K > 4000) throw PrecisionError("covariance truncation bound will not close");
    }

    CovarianceResult res;
    res.box = K;
    res.truncation_bound = box_remainder(t, K);

    // leaner start than the determinant heuristic: the product formula only
    // fights the e^{2t} moment scale, and the doubling certificate recovers
    // any shortfall
    mpfr_prec_t wp = std::max<mpfr_prec_t>(256, static_cast<mpfr_prec_t>(12 * t) + 4 * K + 64);
    double prev = covariance_at_prec(t, K, wp);
    for (;;) {
        if (2 * wp > (1l << 20))
            throw PrecisionError("covariance certificate not reached below precision ceiling");
        wp *= 2;
        const double next = covariance_at_prec(t, K, wp);
        if (std::fabs(next - prev) < tol) {
            res.covariance = next;
            res.prec_bits = wp;
            return res;
        }
        prev = next;
    }
}

// ---------------------------------------------------------------------------
// Residual-series harnesses

namespace {

ResidualSeries finish(std::vector<ResidualPoint> pts) {
    ResidualSeries s;
    s.points = std::move(pts);
    std::vector<std::pair<double, double>> series;
    for (const auto& p : s.points) series.emplace_back(p.t, std::fabs(p.residual));
    const DecayFit f = fit_decay(series);
    s.slope = f.slope;
    s.intercept = f.intercept;
    return s;
}

}  // namespace

ResidualSeries verify_marginal_expansion(const HmSolution& hm, double x,
                                         const std::vector<double>& tgrid, long tol_bits) {
    std::vector<ResidualPoint> pts(tgrid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tgrid.size(); i++) {
        const double t = tgrid[i];
        DistributionPoint exact = nes_marginal_cdf(t, level_j(t, x), tol_bits);
        const double approx = marginal_expansion(hm, t, x);
        pts[i] = {t, exact.value.to_double(), approx, exact.value.to_double() - approx};
    }
    return finish(std::move(pts));
}

ResidualSeries verify_lis_expansion(const HmSolution& hm, double x,
                                    const std::vector<double>& tgrid, long tol_bits) {
    std::vector<ResidualPoint> pts(tgrid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tgrid.size(); i++) {
        const double t = tgrid[i];
        DistributionPoint exact = lis_length_cdf(t, level_ell(t, x), tol_bits);
        const double approx = lis_expansion(hm, t, x);
        pts[i] = {t, exact.value.to_double(), approx, exact.value.to_double() - approx};
    }
    return finish(std::move(pts));
}

ResidualSeries verify_joint_expansion(const HmSolution& hm, double x, double xp,
                                      const std::vector<double>& tgrid, long tol_bits) {
    std::vector<ResidualPoint> pts(tgrid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tgrid.size(); i++) {
        const double t = tgrid[i];
        const int j = level_j(t, x), k = level_j(t, xp);
        const double joint = joint_cdf(t, k, j, tol_bits).value.to_double();
        const double mj = nes_marginal_cdf(t, j, tol_bits).value.to_double();
        const double mk = nes_marginal_cdf(t, k, tol_bits).value.to_double();
        const double approx = mk * mj + joint_leading_correction(hm, t, x, xp);
        pts[i] = {t, joint, approx, joint - approx};
    }
    return finish(std::move(pts));
}

ResidualSeries verify_prop62(const HmSolution& hm, const std::vector<double>& tgrid,
                             long tol_bits) {
    std::vector<ResidualPoint> pts(tgrid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tgrid.size(); i++) {
        const double t = tgrid[i];
        const int n = 2 * static_cast<int>(t);
        const int m = n + 1;
        const double r = prop62_residual(hm, t, n, m, tol_bits);
        pts[i] = {t, 0.0, 0.0, r};
    }
    return finish(std::move(pts));
}

ResidualSeries verify_prop63(const HmSolution& hm, const std::vector<double>& tgrid,
                             long tol_bits) {
    std::vector<ResidualPoint> pts(tgrid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tgrid.size(); i++) {
        const double t = tgrid[i];
        const int n = 2 * static_cast<int>(t);
        const double r = prop63_residual(hm, t, n, tol_bits);
        pts[i] = {t, 0.0, 0.0, r};
    }
    return finish(std::move(pts));
}

}  // namespace matchstat
