#include "matchstat/distributions.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace matchstat {

const char* route_name(Route r) {
    switch (r) {
        case Route::Determinant: return "determinant";
        case Route::Prop1Quadrature: return "quadrature";
        case Route::PoissonTruncation: return "poisson_truncation";
    }
    return "?";
}

namespace {

BigReal half_t_squared(double t, mpfr_prec_t prec) {
    BigReal x(t, prec);
    return ldexp2(x * x, -1);
}

void clamp_tiny_negative(DistributionPoint& p) {
    if (p.value.sign() < 0 && agree_abs(p.value, BigReal(0.0, p.value.prec()), p.certified_bits))
        p.value = BigReal(0.0, p.value.prec());
}

}  // namespace

DistributionPoint joint_cdf(double t, int k, int j, long tol_bits) {
    if (k < 0 || j < 0) throw ValidationError("joint_cdf requires k, j >= 0");
    if (t < 0) throw ValidationError("joint_cdf requires t >= 0");
    const int m = j + k + 1;
    Certified det = toeplitz_minus_hankel_det(MeasureKind::Discrete, m, t, j, tol_bits);
    DistributionPoint p;
    p.t = t;
    p.k = k;
    p.j = j;
    p.route = Route::Determinant;
    p.prec_bits = det.prec_bits;
    p.certified_bits = det.agreed_bits;
    p.value = exp(-half_t_squared(t, det.value.prec())) * det.value;
    clamp_tiny_negative(p);
    return p;
}

DistributionPoint nes_marginal_cdf(double t, int j, long tol_bits) {
    if (j < 0) throw ValidationError("nes_marginal_cdf requires j >= 0");
    if (t < 0) throw ValidationError("nes_marginal_cdf requires t >= 0");
    Certified det = toeplitz_minus_hankel_det(MeasureKind::Continuous, 0, t, j, tol_bits);
    DistributionPoint p;
    p.t = t;
    p.j = j;
    p.route = Route::Determinant;
    p.prec_bits = det.prec_bits;
    p.certified_bits = det.agreed_bits;
    p.value = exp(-half_t_squared(t, det.value.prec())) * det.value;
    clamp_tiny_negative(p);
    return p;
}

DistributionPoint lis_length_cdf(double t, int ell, long tol_bits) {
    if (ell < 0) throw ValidationError("lis_length_cdf requires ell >= 0");
    if (t < 0) throw ValidationError("lis_length_cdf requires t >= 0");
    Certified det = toeplitz_det(MeasureKind::Continuous, 0, t, ell, tol_bits);
    DistributionPoint p;
    p.t = t;
    p.j = ell;
    p.route = Route::Determinant;
    p.prec_bits = det.prec_bits;
    p.certified_bits = det.agreed_bits;
    BigReal tt(t, det.value.prec());
    p.value = exp(-(tt * tt)) * det.value;
    clamp_tiny_negative(p);
    return p;
}

TruncatedValue joint_cdf_poisson(double t, int k, int j,
                                 const std::vector<StatTable>& tables, mpfr_prec_t prec_bits) {
    const mpfr_prec_t wp = prec_bits + 64;
    const int n_max = static_cast<int>(tables.size()) - 1;
    if (n_max < 0) throw ValidationError("joint_cdf_poisson needs at least the n = 0 table");

    // sum over n of g_{k,j}(n) t^{2n} / (2n)! ; factor[n] = t^{2n}/(2n)!
    BigReal sum(0.0, wp);
    BigReal factor(1.0, wp);
    const BigReal t2(t * t, wp);
    for (int n = 0; n <= n_max; n++) {
        if (n > 0) {
            factor *= t2;
            factor /= BigReal(2 * n - 1, wp);
            factor /= BigReal(2 * n, wp);
        }
        const std::uint64_t g = (n == 0) ? 1 : tables[n].at(k, j);
        sum += factor * BigReal(static_cast<long>(g), wp);
    }

    // Discarded terms are bounded by P{N = n} = e^{-t^2/2}(t^2/2)^n/n!; the
    // whole tail by the complementary Poisson cdf.
    BigReal poisson_seen(0.0, wp);
    BigReal pn = exp(-half_t_squared(t, wp));
    for (int n = 0; n <= n_max; n++) {
        poisson_seen += pn;
        pn *= half_t_squared(t, wp);
        pn /= BigReal(n + 1, wp);
    }
    TruncatedValue r{exp(-half_t_squared(t, wp)) * sum, BigReal(1.0, wp) - poisson_seen};
    if (r.tail_bound.sign() < 0) r.tail_bound = BigReal(0.0, wp);
    return r;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes

namespace {

void legendre_eval(int n, const BigReal& x, BigReal& p, BigReal& dp) {
    const mpfr_prec_t wp = x.prec();
    BigReal p0(1.0, wp), p1 = x;
    for (int k = 2; k <= n; k++) {
        BigReal pk = (BigReal(2 * k - 1, wp) * x * p1 - BigReal(k - 1, wp) * p0) /
                     BigReal(k, wp);
        p0 = std::move(p1);
        p1 = std::move(pk);
    }
    p = p1;
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    BigReal one(1.0, wp);
    dp = BigReal(static_cast<long>(n), wp) * (x * p1 - p0) / (x * x - one);
}

struct GlKey {
    int n;
    mpfr_prec_t prec;
    bool operator<(const GlKey& o) const { return std::tie(n, prec) < std::tie(o.n, o.prec); }
};

std::map<GlKey, std::pair<std::vector<BigReal>, std::vector<BigReal>>> gl_cache;
std::mutex gl_mutex;

}  // namespace

void gauss_legendre(int n, mpfr_prec_t prec_bits,
                    std::vector<BigReal>& nodes, std::vector<BigReal>& weights) {
    {
        std::lock_guard<std::mutex> lock(gl_mutex);
        auto it = gl_cache.find({n, prec_bits});
        if (it != gl_cache.end()) {
            nodes = it->second.first;
            weights = it->second.second;
            return;
        }
    }
    const mpfr_prec_t wp = prec_bits + 32;
    nodes.assign(n, BigReal(wp));
    weights.assign(n, BigReal(wp));
    const int newton_iters = 8 + static_cast<int>(std::log2(static_cast<double>(wp)));
    for (int i = 0; i < (n + 1) / 2; i++) {
        double guess = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        BigReal x(guess, wp), p(wp), dp(wp);
        for (int it = 0; it < newton_iters; it++) {
            legendre_eval(n, x, p, dp);
            x -= p / dp;
        }
        legendre_eval(n, x, p, dp);
        BigReal one(1.0, wp);
        BigReal w = ldexp2(one / ((one - x * x) * dp * dp), 1);
        nodes[i] = -x;  // ascending order
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = std::move(w);
    }
    std::lock_guard<std::mutex> lock(gl_mutex);
    gl_cache[{n, prec_bits}] = {nodes, weights};
}

// ---------------------------------------------------------------------------
// Quadrature route for the log-probabilities

namespace {

// r_{2j}, r_{2j+1}, r_{2j+2} at parameter tau.
struct ReflTriple {
    BigReal r0, r1, r2;
};

ReflTriple reflections_at(MeasureKind kind, int m, int j, const BigReal& tau, mpfr_prec_t wp) {
    OpucSequence seq = levinson(kind, m, tau, 2 * j + 2, wp);
    return {seq.reflection[2 * j], seq.reflection[2 * j + 1], seq.reflection[2 * j + 2]};
}

BigReal q_of_triple(const ReflTriple& r) {
    BigReal prod = r.r0 * r.r2;
    BigReal sq = r.r1 * r.r1;
    return -(prod + sq) + prod * sq;
}

BigReal log_cdf_quadrature_impl(MeasureKind kind, int m, int j, double t,
                                mpfr_prec_t prec_bits, double tol_abs, int nodes_per_unit) {
    if (t < 0) throw ValidationError("quadrature requires t >= 0");
    if (t == 0) return BigReal(0.0, prec_bits);
    const mpfr_prec_t wp = prec_bits + 64;
    const int panels = std::max(1, static_cast<int>(std::ceil(t)));

    BigReal prev(0.0, wp);
    bool have_prev = false;
    for (int nodes = nodes_per_unit;; nodes *= 2) {
        if (nodes > 4096)
            throw PrecisionError("quadrature failed to stabilize at " + std::to_string(tol_abs));
        std::vector<BigReal> xs, ws;
        gauss_legendre(nodes, wp, xs, ws);

        BigReal total(0.0, wp);
        const BigReal t_big(t, wp);
        const BigReal panel_width = t_big / BigReal(panels, wp);
        const BigReal half_width = ldexp2(panel_width, -1);
        // Per-node contributions are stored and reduced in index order:
        // BigReal addition is rounded, so a schedule-dependent order would
        // change low-order bits from run to run.
        std::vector<BigReal> contrib(static_cast<std::size_t>(panels) * nodes, BigReal(wp));
#pragma omp parallel for schedule(dynamic) collapse(2)
        for (int p = 0; p < panels; p++) {
            for (int i = 0; i < nodes; i++) {
                BigReal center = panel_width * BigReal(p, wp) + half_width;
                BigReal tau = center + half_width * xs[i];
                ReflTriple r = reflections_at(kind, m, j, tau, wp);
                // pi_{2j+1}(0;tau) + (t - tau) Q_j(tau)
                contrib[static_cast<std::size_t>(p) * nodes + i] =
                    ws[i] * (r.r1 + (t_big - tau) * q_of_triple(r));
            }
        }
        for (const BigReal& c : contrib) total += c;
        total *= half_width;
        if (have_prev && abs(total - prev) < BigReal(tol_abs, wp)) return total;
        prev = std::move(total);
        have_prev = true;
    }
}

}  // namespace

BigReal log_joint_cdf_quadrature(double t, int k, int j, mpfr_prec_t prec_bits,
                                 double tol_abs, int nodes_per_unit) {
    if (k < 1) throw SingularityError("quadrature route needs k >= 1 (degree 2j+2 <= 2m-1)");
    return log_cdf_quadrature_impl(MeasureKind::Discrete, j + k + 1, j, t, prec_bits, tol_abs,
                                   nodes_per_unit);
}

BigReal log_marginal_cdf_quadrature(double t, int j, mpfr_prec_t prec_bits,
                                    double tol_abs, int nodes_per_unit) {
    return log_cdf_quadrature_impl(MeasureKind::Continuous, 0, j, t, prec_bits, tol_abs,
                                   nodes_per_unit);
}

// ---------------------------------------------------------------------------
// Flow identities

FlowIdentityReport flow_identity_report(MeasureKind kind, int m, double t, int nmax,
                                        double step, mpfr_prec_t prec_bits) {
    if (step <= 0 || t - step < 0) throw ValidationError("need 0 < step <= t");
    if (nmax < 2) throw ValidationError("flow identities need nmax >= 2");
    const mpfr_prec_t wp = prec_bits + 64;

    // t +- step evaluated exactly (both fit in twice the double mantissa).
    const BigReal t_mid(t, wp), h_big(step, wp);
    OpucSequence mid = levinson(kind, m, t_mid, nmax, wp);
    OpucSequence lo = levinson(kind, m, t_mid - h_big, nmax, wp);
    OpucSequence hi = levinson(kind, m, t_mid + h_big, nmax, wp);

    FlowIdentityReport rep;
    rep.t = t;
    rep.step = step;
    rep.nmax = nmax;
    const BigReal one(1.0, wp);
    const BigReal two_h = ldexp2(h_big, 1);

    for (int n = 1; n <= nmax - 1; n++) {
        BigReal fd = (hi.reflection[n] - lo.reflection[n]) / two_h;
        BigReal rhs = (mid.reflection[n + 1] - mid.reflection[n - 1]) *
                      (one - mid.reflection[n] * mid.reflection[n]);
        rep.reflection_ode = std::max(rep.reflection_ode, std::fabs((fd - rhs).to_double()));
    }
    for (int n = 0; n <= nmax - 1; n++) {
        BigReal fd = (log(hi.norm[n]) - log(lo.norm[n])) / two_h;
        BigReal rhs = ldexp2(mid.reflection[n + 1] * mid.reflection[n], 1);
        rep.log_norm_ode = std::max(rep.log_norm_ode, std::fabs((fd + rhs).to_double()));
    }

    const int j = (nmax - 2) / 2;
    rep.j = j;
    if (j >= 1) {
        BigReal fd_h = (hi.log_toeplitz_minus_hankel(j) - lo.log_toeplitz_minus_hankel(j)) / two_h;
        BigReal fd_t = (hi.log_toeplitz(2 * j + 1) - lo.log_toeplitz(2 * j + 1)) / two_h;
        BigReal rhs = mid.reflection[2 * j + 1] + ldexp2(fd_t, -1);
        rep.h_identity = std::fabs((fd_h - rhs).to_double());

        // (1/2) d^2/dt^2 [log T_{2j+1} - t^2] = Q_j
        BigReal h2 = h_big * h_big;
        BigReal second = (hi.log_toeplitz(2 * j + 1) - ldexp2(mid.log_toeplitz(2 * j + 1), 1) +
                          lo.log_toeplitz(2 * j + 1)) / h2;
        BigReal lhs = ldexp2(second, -1) - one;
        ReflTriple triple{mid.reflection[2 * j], mid.reflection[2 * j + 1],
                          mid.reflection[2 * j + 2]};
        rep.second_log_det = std::fabs((lhs - q_of_triple(triple)).to_double());
    }
    return rep;
}

}  // namespace matchstat
