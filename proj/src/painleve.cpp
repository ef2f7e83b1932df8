#include "matchstat/painleve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "matchstat/bigreal.hpp"

namespace matchstat {

// ---------------------------------------------------------------------------
// Airy functions

namespace {

// Ai(x) = c1 f(x) - c2 g(x), f = sum a_k x^{3k}, g = sum b_k x^{3k+1},
// a_{k+1} = a_k x^3/((3k+2)(3k+3)), b_{k+1} = b_k x^3/((3k+3)(3k+4)).
// The same recurrences differentiated give Ai'.
void airy_pair(double x, double& ai, double& aip) {
    const double pad = 1.92 * std::pow(std::fabs(x), 1.5);
    const mpfr_prec_t wp = 128 + static_cast<mpfr_prec_t>(pad);

    const BigReal three(3.0, wp);
    const BigReal third = BigReal(1.0, wp) / three;
    const BigReal two_thirds = BigReal(2.0, wp) / three;
    BigReal c1(wp), c2(wp);
    mpfr_gamma(c1.raw(), two_thirds.raw(), MPFR_RNDN);  // Gamma(2/3)
    mpfr_gamma(c2.raw(), third.raw(), MPFR_RNDN);       // Gamma(1/3)
    BigReal c1v = BigReal(1.0, wp) / (exp(log(three) * two_thirds) * c1);
    BigReal c2v = BigReal(1.0, wp) / (exp(log(three) * third) * c2);

    BigReal xb(x, wp);
    BigReal x3 = xb * xb * xb;
    BigReal f(1.0, wp), fp(0.0, wp), g = xb, gp(1.0, wp);
    BigReal a(1.0, wp), b = xb;
    for (int k = 0;; k++) {
        a = a * x3 / BigReal((3 * k + 2) * (3 * k + 3), wp);
        b = b * x3 / BigReal((3 * k + 3) * (3 * k + 4), wp);
        f += a;
        g += b;
        // term derivatives: a_k d/dx x^{3k} handled via 3k/x; x = 0 is exact
        // already (f' = 0, g' = 1 there)
        if (x != 0.0) {
            fp += a * BigReal(3 * (k + 1), wp) / xb;
            gp += b * BigReal(3 * k + 4, wp) / xb;
        }
        if (k > 8 && abs(a) < ldexp2(BigReal(1.0, wp), -static_cast<long>(wp) - 8) &&
            abs(b) < ldexp2(BigReal(1.0, wp), -static_cast<long>(wp) - 8))
            break;
        if (k > 100000) throw ConvergenceError("Airy series failed to terminate");
    }
    ai = (c1v * f - c2v * g).to_double();
    aip = (c1v * fp - c2v * gp).to_double();
}

}  // namespace

double airy_ai(double x) {
    double ai, aip;
    airy_pair(x, ai, aip);
    return ai;
}

double airy_ai_prime(double x) {
    double ai, aip;
    airy_pair(x, ai, aip);
    return aip;
}

// ---------------------------------------------------------------------------
// Finite differences and quadrature helpers on uniform grids

namespace {

// Fornberg weights for the m-th derivative at x0 from nodes xs (exact
// algorithm from "Generation of finite difference formulas on arbitrarily
// spaced grids", 1988).
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
    const int n = static_cast<int>(xs.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; i++) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j <= i - 1; j++) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; k--)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; k--)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; i++) w[i] = c[i][m];
    return w;
}

// Derivative of grid samples with 7-point stencils (6th order), one-sided at
// the edges.
std::vector<double> derivative_on_grid(const std::vector<double>& v, double h, int order) {
    const int n = static_cast<int>(v.size());
    const int width = 7;
    std::vector<double> out(n);
    std::vector<double> xs(width);
    for (int i = 0; i < n; i++) {
        int start = std::clamp(i - width / 2, 0, n - width);
        for (int k = 0; k < width; k++) xs[k] = (start + k - i) * h;
        std::vector<double> w = fd_weights(0.0, xs, order);
        double acc = 0;
        for (int k = 0; k < width; k++) acc += w[k] * v[start + k];
        out[i] = acc;
    }
    return out;
}

// Weights for integrating over one unit cell [c, c+1] from samples at
// 0..5 (degree-5 exactness): solve the 6x6 moment system.
std::array<double, 6> cell_weights(int c) {
    // Vandermonde system sum_k w_k k^p = ((c+1)^{p+1} - c^{p+1})/(p+1)
    double a[6][7];
    for (int p = 0; p < 6; p++) {
        for (int k = 0; k < 6; k++) a[p][k] = std::pow(static_cast<double>(k), p);
        a[p][6] = (std::pow(c + 1.0, p + 1) - std::pow(static_cast<double>(c), p + 1)) / (p + 1);
    }
    for (int col = 0; col < 6; col++) {
        int piv = col;
        for (int r = col + 1; r < 6; r++)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        for (int r = 0; r < 6; r++) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int k = col; k < 7; k++) a[r][k] -= f * a[col][k];
        }
    }
    std::array<double, 6> w;
    for (int k = 0; k < 6; k++) w[k] = a[k][6] / a[k][k];
    return w;
}

}  // namespace

std::vector<double> cumulative_from_right(const std::vector<double>& v, double h, double tail) {
    const int n = static_cast<int>(v.size());
    if (n < 6) throw ValidationError("cumulative_from_right needs at least 6 samples");
    static const std::array<std::array<double, 6>, 5> kW = {
        cell_weights(0), cell_weights(1), cell_weights(2), cell_weights(3), cell_weights(4)};
    std::vector<double> out(n);
    out[n - 1] = tail;
    for (int i = n - 2; i >= 0; i--) {
        int start = std::clamp(i - 2, 0, n - 6);
        const auto& w = kW[i - start];
        double cell = 0;
        for (int k = 0; k < 6; k++) cell += w[k] * v[start + k];
        out[i] = out[i + 1] + h * cell;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hastings-McLeod boundary value problem

namespace {

struct Tridiag {
    std::vector<double> sub, diag, sup;
};

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiag(Tridiag& t, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int i = 1; i < n; i++) {
        const double m = t.sub[i] / t.diag[i - 1];
        t.diag[i] -= m * t.sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= t.diag[n - 1];
    for (int i = n - 2; i >= 0; i--) rhs[i] = (rhs[i] - t.sup[i] * rhs[i + 1]) / t.diag[i];
}

std::vector<double> numerov_residual(const std::vector<double>& q, const std::vector<double>& s,
                                     double h) {
    const int n = static_cast<int>(q.size());
    std::vector<double> r(n - 2);
    const double w = h * h / 12.0;
    auto g = [&](int i) { return s[i] * q[i] + 2.0 * q[i] * q[i] * q[i]; };
    for (int i = 1; i <= n - 2; i++)
        r[i - 1] = q[i - 1] - 2.0 * q[i] + q[i + 1] - w * (g(i - 1) + 10.0 * g(i) + g(i + 1));
    return r;
}

std::vector<double> solve_q_on_grid(const std::vector<double>& s, double h) {
    const int n = static_cast<int>(s.size());
    std::vector<double> q(n);

    // smooth positive initial guess between the two asymptotes
    const double left = std::sqrt(-s.front() / 2.0);
    for (int i = 0; i < n; i++) {
        if (s[i] <= -1.0)
            q[i] = std::sqrt(-s[i] / 2.0);
        else if (s[i] >= 1.0)
            q[i] = 0.1353 * std::exp(-(s[i] - 1.0));
        else
            q[i] = 0.7071 + (s[i] + 1.0) / 2.0 * (0.1353 - 0.7071);
    }
    q.front() = left;
    q.back() = airy_ai(s.back());

    const double w = h * h / 12.0;
    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    };

    std::vector<double> r = numerov_residual(q, s, h);
    double rnorm = inf_norm(r);
    for (int iter = 0; iter < 100; iter++) {
        if (rnorm < 1e-14 * (1.0 + inf_norm(q))) return q;
        Tridiag jac;
        jac.sub.resize(n - 2);
        jac.diag.resize(n - 2);
        jac.sup.resize(n - 2);
        auto gq = [&](int i) { return s[i] + 6.0 * q[i] * q[i]; };
        for (int i = 1; i <= n - 2; i++) {
            jac.sub[i - 1] = 1.0 - w * gq(i - 1);
            jac.diag[i - 1] = -2.0 - 10.0 * w * gq(i);
            jac.sup[i - 1] = 1.0 - w * gq(i + 1);
        }
        std::vector<double> step = r;
        for (double& x : step) x = -x;
        solve_tridiag(jac, step);

        double damping = 1.0;
        for (int half = 0; half < 40; half++) {
            std::vector<double> trial = q;
            for (int i = 1; i <= n - 2; i++) trial[i] += damping * step[i - 1];
            std::vector<double> rt = numerov_residual(trial, s, h);
            const double rtnorm = inf_norm(rt);
            if (rtnorm < rnorm || rnorm < 1e-12) {
                q = std::move(trial);
                r = std::move(rt);
                rnorm = rtnorm;
                break;
            }
            damping *= 0.5;
            if (half == 39)
                throw ConvergenceError("Newton iteration stalled; try a denser grid");
        }
    }
    throw ConvergenceError("Newton iteration did not converge; try a denser grid");
}

struct DerivedArrays {
    std::vector<double> qp, u, qp2int, lf_goe, lf_gue;
};

// Tail integrals over [s_max, s_max+16] from the Airy asymptote, then the
// cumulative integrals on the main grid.
DerivedArrays derive_arrays(const std::vector<double>& q, double s_min, double s_max, double h) {
    const int n = static_cast<int>(q.size());
    DerivedArrays d;
    d.qp = derivative_on_grid(q, h, 1);

    const double ext_h = 1.0 / 64.0;
    const int ext_n = static_cast<int>(16.0 / ext_h) + 1;
    std::vector<double> ai(ext_n), aip(ext_n);
    for (int i = 0; i < ext_n; i++) airy_pair(s_max + i * ext_h, ai[i], aip[i]);

    auto ext_integral = [&](auto&& f) {
        std::vector<double> v(ext_n);
        for (int i = 0; i < ext_n; i++) v[i] = f(i);
        return cumulative_from_right(v, ext_h, 0.0).front();
    };
    const double tail_q2 = ext_integral([&](int i) { return ai[i] * ai[i]; });
    const double tail_qp2 = ext_integral([&](int i) { return aip[i] * aip[i]; });
    // u on the extension is -(Ai'^2 - x Ai^2) (closed form of -int_x^inf Ai^2)
    auto u_ext = [&](int i) {
        const double x = s_max + i * ext_h;
        return -(aip[i] * aip[i] - x * ai[i] * ai[i]);
    };
    const double tail_u = ext_integral(u_ext);
    const double tail_u_minus_q = ext_integral([&](int i) { return u_ext(i) - ai[i]; });

    std::vector<double> q2(n), qp2(n);
    for (int i = 0; i < n; i++) {
        q2[i] = q[i] * q[i];
        qp2[i] = d.qp[i] * d.qp[i];
    }
    // u(s) = -[ int_s^{smax} q^2 + tail ]
    d.u = cumulative_from_right(q2, h, tail_q2);
    for (double& x : d.u) x = -x;
    d.qp2int = cumulative_from_right(qp2, h, tail_qp2);
    for (double& x : d.qp2int) x = -x;

    // log F = (1/2) int_s^inf (u - q) needs u first
    std::vector<double> u_minus_q(n);
    for (int i = 0; i < n; i++) u_minus_q[i] = d.u[i] - q[i];
    d.lf_goe = cumulative_from_right(u_minus_q, h, tail_u_minus_q);
    for (double& x : d.lf_goe) x *= 0.5;
    d.lf_gue = cumulative_from_right(d.u, h, tail_u);
    return d;
}

}  // namespace

HmSolution solve_hastings_mcleod(double s_min, double s_max, int npoints, double tol) {
    if (!(s_min < -5.0 && s_max > 5.0))
        throw ValidationError("need s_min < -5 < 5 < s_max");
    if (npoints < 2000) throw ValidationError("need npoints >= 2000");

    int n = npoints;
    std::vector<double> s(n), q_coarse;
    double h = 0;
    std::vector<double> q;
    double gap = 0;
    for (int attempt = 0;; attempt++) {
        h = (s_max - s_min) / (n - 1);
        s.resize(n);
        for (int i = 0; i < n; i++) s[i] = s_min + i * h;
        q = solve_q_on_grid(s, h);
        if (!q_coarse.empty()) {
            gap = 0;
            for (std::size_t i = 0; i < q_coarse.size(); i++)
                gap = std::max(gap, std::fabs(q_coarse[i] - q[2 * i]));
            if (gap < tol) break;
        }
        if (attempt == 4)
            throw PrecisionError("grid doubling did not reach the requested tolerance");
        q_coarse = q;
        n = 2 * n - 1;
    }

    HmSolution hm;
    hm.s_min = s_min;
    hm.s_max = s_max;
    hm.npoints = n;
    hm.h = h;
    hm.q = std::move(q);
    hm.richardson_gap = gap;

    DerivedArrays d = derive_arrays(hm.q, s_min, s_max, h);
    hm.qp = std::move(d.qp);
    hm.u = std::move(d.u);
    hm.qp2int = std::move(d.qp2int);
    hm.log_f_goe = std::move(d.lf_goe);
    hm.log_f_gue = std::move(d.lf_gue);

    hm.alpha.resize(n);
    hm.beta.resize(n);
    for (int i = 0; i < n; i++) {
        const double qq = hm.q[i], uu = hm.u[i], si = s[i];
        hm.alpha[i] = 0.5 * qq * qq * uu - uu * uu * uu / 6.0 + 2.0 * hm.log_f_goe[i] -
                      hm.qp2int[i];
        hm.beta[i] = hm.qp[i] * uu - qq * (si + 0.5 * qq * qq + 0.5 * uu * uu);
    }

    // invariants
    std::vector<double> qpp = derivative_on_grid(hm.q, h, 2);
    for (int i = 0; i < n; i++) {
        if (!(hm.q[i] > 0)) throw ConvergenceError("q must stay positive on the grid");
        if (i > 0 && hm.u[i] < hm.u[i - 1] - 1e-14)
            throw ConvergenceError("u must be nondecreasing");
        const double quartic = hm.q[i] * hm.q[i] * hm.q[i] * hm.q[i] -
                               (hm.u[i] + hm.qp[i] * hm.qp[i] - s[i] * hm.q[i] * hm.q[i]);
        hm.sup_quartic_residual = std::max(hm.sup_quartic_residual, std::fabs(quartic));
        const double ode = qpp[i] - s[i] * hm.q[i] - 2.0 * hm.q[i] * hm.q[i] * hm.q[i];
        hm.sup_ode_residual = std::max(hm.sup_ode_residual, std::fabs(ode));
    }
    if (hm.u.back() > 0 || hm.u.back() < -1e-8)
        throw ConvergenceError("u(s_max) must sit just below 0");
    if (hm.sup_quartic_residual > 1e-8)
        throw ConvergenceError("quartic first-integral residual above 1e-8: " +
                               std::to_string(hm.sup_quartic_residual));
    return hm;
}

// ---------------------------------------------------------------------------
// Evaluation

double HmSolution::interpolate(const std::vector<double>& a, double x) const {
    const int n = npoints;
    int i0 = static_cast<int>(std::floor((x - s_min) / h)) - 2;
    i0 = std::clamp(i0, 0, n - 6);
    double result = 0;
    for (int k = 0; k < 6; k++) {
        double lk = 1.0;
        const double xk = grid_s(i0 + k);
        for (int l = 0; l < 6; l++) {
            if (l == k) continue;
            lk *= (x - grid_s(i0 + l)) / (xk - grid_s(i0 + l));
        }
        result += lk * a[i0 + k];
    }
    return result;
}

void HmSolution::check_range(double x) const {
    if (x < s_min + 1.0 || x > s_max - 1.0)
        throw RangeError("argument " + std::to_string(x) + " outside [" +
                         std::to_string(s_min + 1.0) + ", " + std::to_string(s_max - 1.0) + "]");
}

double HmSolution::log_cdf(Ensemble which, double x) const {
    check_range(x);
    return interpolate(which == Ensemble::GOE ? log_f_goe : log_f_gue, x);
}

double HmSolution::cdf(Ensemble which, double x) const { return std::exp(log_cdf(which, x)); }

double HmSolution::pdf(Ensemble which, double x) const {
    check_range(x);
    const double f = cdf(which, x);
    const double lp = (which == Ensemble::GOE) ? 0.5 * (q_at(x) - u_at(x)) : -u_at(x);
    return f * lp;
}

double HmSolution::pdf_prime(Ensemble which, double x) const {
    check_range(x);
    const double f = cdf(which, x);
    const double qq = q_at(x), uu = u_at(x);
    double lp, lpp;
    if (which == Ensemble::GOE) {
        lp = 0.5 * (qq - uu);
        lpp = 0.5 * (qp_at(x) - qq * qq);
    } else {
        lp = -uu;
        lpp = -qq * qq;
    }
    return f * (lp * lp + lpp);
}

double pair_g1(const HmSolution& hm, double y, double yt) {
    hm.check_range(y);
    hm.check_range(yt);
    const double qy = hm.q_at(y);
    return 0.5 * (qy * qy * hm.q_at(yt) + hm.u_at(y) * hm.qp_at(yt));
}

double pair_g2(const HmSolution& hm, double y, double yt) {
    hm.check_range(y);
    hm.check_range(yt);
    const double qyt = hm.q_at(yt);
    return 0.5 * (hm.q_at(y) * qyt * qyt + hm.qp_at(y) * hm.u_at(yt));
}

double correction_h(const HmSolution& hm, double y) {
    hm.check_range(y);
    const double qq = hm.q_at(y);
    return 0.2 * hm.u_at(y) * hm.qp_at(y) - 0.2 * qq * qq * qq - 0.05 * y * qq;
}

TwMoments tw_moments(const HmSolution& hm, Ensemble which) {
    const int n = hm.npoints;
    const auto& lf = (which == Ensemble::GOE) ? hm.log_f_goe : hm.log_f_gue;
    std::vector<double> m0(n), m1(n);
    for (int i = 0; i < n; i++) {
        const double x = hm.grid_s(i);
        const double f = std::exp(lf[i]);
        const double lp =
            (which == Ensemble::GOE) ? 0.5 * (hm.q[i] - hm.u[i]) : -hm.u[i];
        const double dens = f * lp;
        m0[i] = x * dens;
        m1[i] = x * x * dens;
    }
    // integrals over the whole grid; both tails are far below 1e-8 here
    TwMoments out;
    out.mean = cumulative_from_right(m0, hm.h, 0.0).front();
    out.variance = cumulative_from_right(m1, hm.h, 0.0).front() - out.mean * out.mean;
    return out;
}

}  // namespace matchstat
