#pragma once

#include <vector>

#include "matchstat/bigreal.hpp"
#include "matchstat/matching.hpp"
#include "matchstat/moments.hpp"
#include "matchstat/opuc.hpp"

namespace matchstat {

enum class Route { Determinant, Prop1Quadrature, PoissonTruncation };

const char* route_name(Route r);

// One evaluated distribution value.  k/j are the crossing/nesting levels (j
// doubles as the permutation length level for the longest-increasing-
// subsequence law).
struct DistributionPoint {
    double t = 0;
    int k = -1;  // -1 = not applicable (marginal / length laws)
    int j = 0;
    BigReal value;
    Route route = Route::Determinant;
    long prec_bits = 0;
    long certified_bits = 0;
};

// P{Cro_t <= k, Nes_t <= j} = e^{-t^2/2} det[h_{a-b} - h_{a+b}]_{a,b=1..j}
// over the discrete measure with m = j+k+1.  Tiny negative round-off inside
// the certificate tolerance is clamped to 0.
DistributionPoint joint_cdf(double t, int k, int j, long tol_bits);

// P{Nes_t <= j}: same determinant over the continuous (Bessel) measure.
DistributionPoint nes_marginal_cdf(double t, int j, long tol_bits);

// P{L_t <= ell} = e^{-t^2} T_ell over the continuous measure (L_t = longest
// increasing subsequence of a permutation of Poisson(t^2) size).
DistributionPoint lis_length_cdf(double t, int ell, long tol_bits);

// Poisson-truncation route from exact tables:
//   P{Cro_t <= k, Nes_t <= j} = e^{-t^2/2} sum_n g_{k,j}(n) t^{2n} / (2n)!
// truncated at the table range; tail_bound is a rigorous bound on the
// discarded mass (each discarded term is at most P{N = n}).
struct TruncatedValue {
    BigReal value;
    BigReal tail_bound;
};
TruncatedValue joint_cdf_poisson(double t, int k, int j,
                                 const std::vector<StatTable>& tables, mpfr_prec_t prec_bits);

// Proposition-style quadrature route for the log-probabilities:
//   log P{Cro_t <= k, Nes_t <= j} = I1 + I2,
//   I1 = int_0^t pi_{2j+1,m}(0;tau) dtau,
//   I2 = int_0^t (t - tau) Q_j(tau) dtau,
//   Q_j = -(r_{2j} r_{2j+2} + r_{2j+1}^2) + r_{2j} r_{2j+2} r_{2j+1}^2,
// with r_n = pi_{n,m}(0;tau).  The double integral of the source formulation
// collapses to the (t - tau)-weighted single integral by Fubini.  Composite
// Gauss-Legendre with nodes_per_unit nodes per unit of t, doubled until the
// result is stable to tol_abs.
BigReal log_joint_cdf_quadrature(double t, int k, int j, mpfr_prec_t prec_bits,
                                 double tol_abs = 1e-10, int nodes_per_unit = 64);

// Continuous-measure analogue: log P{Nes_t <= j}.
BigReal log_marginal_cdf_quadrature(double t, int j, mpfr_prec_t prec_bits,
                                    double tol_abs = 1e-10, int nodes_per_unit = 64);

// Gauss-Legendre nodes and weights on [-1, 1] at the given precision.
void gauss_legendre(int n, mpfr_prec_t prec_bits,
                    std::vector<BigReal>& nodes, std::vector<BigReal>& weights);

// Finite-difference residuals of the t-flow identities of the reflection
// data, all evaluated by central differences of step `step`:
//   d/dt pi_n(0) = (pi_{n+1}(0) - pi_{n-1}(0)) (1 - pi_n(0)^2)
//   (log N_n)'   = -2 pi_{n+1}(0) pi_n(0)
//   (log H_j)'   = pi_{2j+1}(0) + (1/2)(log T_{2j+1})'
//   (1/2)(log(e^{-t^2} T_{2j+1}))'' = Q_j
// Residuals scale as O(step^2); halving the step should shrink them ~4x.
struct FlowIdentityReport {
    double t = 0;
    double step = 0;
    int nmax = 0;
    int j = 0;  // index used for the H/T identities
    double reflection_ode = 0;   // max over 1 <= n <= nmax-1
    double log_norm_ode = 0;     // max over 0 <= n <= nmax-1
    double h_identity = 0;
    double second_log_det = 0;   // eq. above with the second difference
};

FlowIdentityReport flow_identity_report(MeasureKind kind, int m, double t, int nmax,
                                        double step, mpfr_prec_t prec_bits);

}  // namespace matchstat
