#pragma once

#include <vector>

#include "matchstat/bigreal.hpp"
#include "matchstat/errors.hpp"
#include "matchstat/moments.hpp"

namespace matchstat {

// A value together with the precision at which it was computed and the
// number of bits to which two evaluations at consecutive precisions agreed.
struct Certified {
    BigReal value;
    long prec_bits = 0;
    long agreed_bits = 0;
};

// Working precision heuristic for size-n determinants of the weight with
// parameter t: entries scale like e^{2t} while scaled results live in [0,1].
mpfr_prec_t det_start_prec(double t, int n);

// det[h_{a-b}]_{a,b=1..n}; n = 0 gives 1.  LU with partial pivoting,
// recomputed at doubled precision until two runs agree to tol_bits
// (relative).
Certified toeplitz_det(MeasureKind kind, int m, double t, int n, long tol_bits);

// det[h_{a-b} - h_{a+b}]_{a,b=1..j}; j = 0 gives 1.
Certified toeplitz_minus_hankel_det(MeasureKind kind, int m, double t, int j, long tol_bits);

// Independent route for the same determinant in the discrete case, with the
// sine-product entries
//     (1/m) sum_{r=0}^{2m-1} sin(pi r a/m) sin(pi r b/m) e^{2t cos(pi r/m)}
// evaluated directly (no moment table).  Used to cross-validate the
// Toeplitz-minus-Hankel form.
Certified crossing_det_sine_form(int m, double t, int j, long tol_bits);

// Plain LU determinant of a dense matrix at its own precision (no
// certificate); row-major n x n.
BigReal lu_determinant(std::vector<BigReal> a, int n);

// Monic orthogonal-polynomial data on the unit circle for the weight
// e^{t(z+1/z)} against either measure: reflection[n] = pi_n(0) and
// norm[n] = N_n = <pi_n, pi_n>.
struct OpucSequence {
    MeasureKind kind = MeasureKind::Continuous;
    int m = 0;  // discrete only
    double t = 0;
    int nmax = 0;
    mpfr_prec_t prec_bits = 64;
    std::vector<BigReal> reflection;  // index 0..nmax, reflection[0] = 1
    std::vector<BigReal> norm;        // index 0..nmax

    // T_j = prod_{n<j} N_n  (log form to dodge the e^{t^2}-sized magnitudes)
    BigReal log_toeplitz(int j) const;
    // log H_j = sum_{n=1..j} [ log N_{2n} - log(1 - pi_{2n}(0)) ]
    BigReal log_toeplitz_minus_hankel(int j) const;
};

// Szego/Levinson recursion on full coefficient vectors:
//   pi_{n+1}(z) = z pi_n(z) + pi_{n+1}(0) pi*_n(z),
//   pi_{n+1}(0) = -<z pi_n, 1>/N_n,   N_{n+1} = N_n (1 - pi_{n+1}(0)^2).
// All coefficients are real because the weight is real and even.  Throws
// SingularityError when a norm fails to stay positive or a reflection
// coefficient leaves (-1,1) where that is forbidden (continuous measure, or
// discrete with n <= 2m-1).
OpucSequence levinson(const MomentSequence& h, int nmax);

// Convenience: builds the moment table at the required range and precision.
OpucSequence levinson(MeasureKind kind, int m, const BigReal& t, int nmax, mpfr_prec_t prec_bits);
OpucSequence levinson(MeasureKind kind, int m, double t, int nmax, mpfr_prec_t prec_bits);

// Reflection coefficients recomputed at doubled precision until every
// pi_n(0) is stable to tol_bits (absolute).
OpucSequence levinson_certified(MeasureKind kind, int m, double t, int nmax, long tol_bits);

}  // namespace matchstat
