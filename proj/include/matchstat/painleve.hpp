#pragma once

#include <vector>

#include "matchstat/errors.hpp"

namespace matchstat {

// Airy Ai and Ai' by the ascending Maclaurin series, evaluated in big floats
// with enough padding to absorb the cancellation (~1.92 |x|^{3/2} bits).
double airy_ai(double x);
double airy_ai_prime(double x);

enum class Ensemble { GOE, GUE };

// The Hastings-McLeod solution of q'' = s q + 2 q^3 on a uniform grid,
// together with every derived quantity the distribution functions need:
//   q, q' (7-point differences), u(s) = int_inf^s q^2 <= 0,
//   qp2int(s) = int_inf^s q'^2,
//   log_f_goe = (1/2) int_s^inf (u - q),  log_f_gue = int_s^inf u  (negated
//   into the usual orientation so that F = exp(log_f)),
//   alpha = q^2 u / 2 - u^3/6 + 2 log F - qp2int,
//   beta  = q' u - q (s + q^2/2 + u^2/2).
// Off-grid values come from 6-point Lagrange interpolation.
struct HmSolution {
    double s_min = 0, s_max = 0, h = 0;
    int npoints = 0;
    std::vector<double> q, qp, u, qp2int, log_f_goe, log_f_gue, alpha, beta;

    // diagnostics recorded by the solver
    double sup_quartic_residual = 0;  // q^4 - u - q'^2 + s q^2
    double sup_ode_residual = 0;      // 7-point q'' vs s q + 2 q^3
    double richardson_gap = 0;        // max |q_coarse - q_fine| at acceptance

    double grid_s(int i) const { return s_min + i * h; }
    double interpolate(const std::vector<double>& a, double x) const;

    double q_at(double x) const { return interpolate(q, x); }
    double qp_at(double x) const { return interpolate(qp, x); }
    double u_at(double x) const { return interpolate(u, x); }
    double alpha_at(double x) const { return interpolate(alpha, x); }
    double beta_at(double x) const { return interpolate(beta, x); }

    void check_range(double x) const;  // throws RangeError outside [s_min+1, s_max-1]

    double log_cdf(Ensemble which, double x) const;
    double cdf(Ensemble which, double x) const;
    double pdf(Ensemble which, double x) const;        // F' from (log F)' identities
    double pdf_prime(Ensemble which, double x) const;  // F'' likewise, no numerics
};

// Two-point boundary value problem: Dirichlet data q(s_min) = sqrt(-s_min/2),
// q(s_max) = Ai(s_max), 4th-order Numerov discretization, damped Newton, and
// grid doubling until the coarse/fine gap is below tol.
HmSolution solve_hastings_mcleod(double s_min = -12.0, double s_max = 10.0,
                                 int npoints = 8001, double tol = 1e-9);

// Cross terms of the pair expansion and the second-order marginal
// correction:
//   g1(y,yt) = (1/2)(u'(y) q(yt) + u(y) q'(yt)),   u' = q^2,
//   g2(y,yt) = (1/2)(q(y) u'(yt) + q'(y) u(yt)),
//   h(y)     = (1/5) u q' - (1/5) q^3 - (1/20) y q.
double pair_g1(const HmSolution& hm, double y, double yt);
double pair_g2(const HmSolution& hm, double y, double yt);
double correction_h(const HmSolution& hm, double y);

struct TwMoments {
    double mean = 0;
    double variance = 0;
};
TwMoments tw_moments(const HmSolution& hm, Ensemble which);

// Cumulative right-to-left integration of uniform-grid samples with 6-point
// (degree-5) cell rules: out[i] = tail + int_{x_i}^{x_{N-1}} v.  Exposed for
// the quadrature-heavy tests.
std::vector<double> cumulative_from_right(const std::vector<double>& v, double h, double tail);

}  // namespace matchstat
