#pragma once

#include <utility>
#include <vector>

#include "matchstat/distributions.hpp"
#include "matchstat/painleve.hpp"

namespace matchstat {

// Edge scaling map a(gamma), the real branch of
//   gamma >= 1: a = [3(gamma log(gamma + sqrt(gamma^2-1)) - sqrt(gamma^2-1))]^{2/3}
//   gamma <  1: a = -[3(sqrt(1-gamma^2) - gamma arccos gamma)]^{2/3}
// with the series 2(gamma-1) - (gamma-1)^2/15 near gamma = 1 where the closed
// forms cancel.
double edge_scale_a(double gamma);

// s(gamma) = t^{2/3} a(gamma).
double painleve_scale_s(double gamma, double t);

// Integer levels of the scaled coordinates.
int level_j(double t, double x);    // [t + x t^{1/3}/2]
int level_ell(double t, double x);  // [2t + x t^{1/3}]

// All scaling data for one (t, x, x') triple.
struct ScalingPoint {
    double t = 0, x = 0, xp = 0;
    int j = 0, k = 0;
    double x_t = 0;        // (2j+1-2t)/t^{1/3}
    double x_t_prime = 0;  // (2k+1-2t)/t^{1/3}
    double x_super = 0;    // ([2t + x t^{1/3}] - 2t)/t^{1/3}
    double gamma = 0, gamma_tilde = 0;
    double s = 0, s_tilde = 0;
};
ScalingPoint make_scaling_point(double t, double x, double xp);

// Second-order expansions of the limit laws:
//   marginal: F(x_t) - [4 F''(x) + x^2 F'(x)/3] / (20 t^{2/3})
//   length:   F_GUE(x^(t)) - [F_GUE''(x) + x^2 F_GUE'(x)/6] / (10 t^{2/3})
double marginal_expansion(const HmSolution& hm, double t, double x);
double lis_expansion(const HmSolution& hm, double t, double x);

// Leading joint correction F'(x) F'(x') / t^{2/3}.
double joint_leading_correction(const HmSolution& hm, double t, double x, double xp);

// pi_{n,infinity}(0;t) as a double (certified big-float Levinson inside).
double reflection_continuous(double t, int n, long tol_bits = 80);
double reflection_discrete(double t, int n, int m, long tol_bits = 80);

// Residual of the discrete-vs-continuous reflection expansion
//   pi_{n,m}(0;t) ~ pi_{n,inf}(0;t) - (-1)^n pi_{2m-n,inf}(0;t)
//                   + [g1(s,s~) - (-1)^n g2(s,s~)]/t
double prop62_residual(const HmSolution& hm, double t, int n, int m, long tol_bits = 80);

// Residual of the continuous reflection expansion
//   (-1)^n pi_{n,inf}(0;t) ~ t^{-1/3} q(s)(1 - (gamma-1)/30) + t^{-1} h(s)
double prop63_residual(const HmSolution& hm, double t, int n, long tol_bits = 80);

struct DecayFit {
    double slope = 0;
    double intercept = 0;
};
// Least-squares fit of log|residual| against log t.  Throws
// DegenerateFitError when a residual vanishes (its log is not usable).
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series);

// Cov(Cro_t, Nes_t) from the CDF grids:
//   Cov = sum_{k,j >= 0} [ P{X<=k, Y<=j} - P{X<=k} P{Y<=j} ]
// with the grid truncated at K and the remainder certified by the union
// bounds |summand| <= min(P{X>k}, P{Y>j}) and the superexponential tail
// P{X >= k} <= t^{2k}/(2k)!  (expected number of k-crossings).  The whole
// antidiagonal j+k+1 = m of joint values comes from one Levinson run via
// H_j = prod_{n<=j} N_{2n}/(1 - pi_{2n}(0)); the same products are pinned
// against LU determinants elsewhere in the test suite.
struct CovarianceResult {
    double covariance = 0;
    double truncation_bound = 0;  // rigorous bound on the discarded mass
    int box = 0;                  // grid cut K
    long prec_bits = 0;
};
CovarianceResult poissonized_covariance(double t, long tol_bits = 60);

// Verification harnesses shared by the CLI and the acceptance suite.
struct ResidualPoint {
    double t = 0;
    double exact = 0;
    double approx = 0;
    double residual = 0;
};
struct ResidualSeries {
    std::vector<ResidualPoint> points;
    double slope = 0;
    double intercept = 0;
};

ResidualSeries verify_marginal_expansion(const HmSolution& hm, double x,
                                         const std::vector<double>& tgrid, long tol_bits = 80);
ResidualSeries verify_lis_expansion(const HmSolution& hm, double x,
                                    const std::vector<double>& tgrid, long tol_bits = 80);
ResidualSeries verify_joint_expansion(const HmSolution& hm, double x, double xp,
                                      const std::vector<double>& tgrid, long tol_bits = 80);
ResidualSeries verify_prop62(const HmSolution& hm, const std::vector<double>& tgrid,
                             long tol_bits = 80);  // n = 2t, m = n/2 + 1
ResidualSeries verify_prop63(const HmSolution& hm, const std::vector<double>& tgrid,
                             long tol_bits = 80);  // n = 2t

}  // namespace matchstat
