#pragma once

#include <vector>

#include "matchstat/bigreal.hpp"
#include "matchstat/errors.hpp"

namespace matchstat {

enum class MeasureKind { Discrete, Continuous };

// Trigonometric moment of the discrete weight with atoms at the 2m-th roots
// of unity:
//     h_l = (1/2m) sum_{r=0}^{2m-1} cos(pi r l / m) e^{2 t cos(pi r / m)}.
// The imaginary parts cancel in pairs (r <-> 2m-r), so only the cosine sum is
// evaluated; the r and 2m-r terms are folded together.
BigReal moment_discrete(long ell, int m, const BigReal& t, mpfr_prec_t prec_bits);
BigReal moment_discrete(long ell, int m, double t, mpfr_prec_t prec_bits);

// Moment of the continuous weight e^{t(z+1/z)} dz/(2 pi i z): the modified
// Bessel function I_|l|(2t), by the ascending series
//     I_l(2t) = sum_k t^{2k+l} / (k! (k+l)!)
// summed until the geometric tail bound drops below the target precision.
BigReal moment_continuous(long ell, const BigReal& t, mpfr_prec_t prec_bits);
BigReal moment_continuous(long ell, double t, mpfr_prec_t prec_bits);

// I_nu(x) for nu >= 0, x >= 0 at the precision of x.
BigReal bessel_i(long nu, const BigReal& x);

// One-step transition weight of the continuous-time simple random walk:
// p_t(a) = e^{-2t} I_|a|(2t).
BigReal walk_transition(long a, double t, mpfr_prec_t prec_bits);

// Materialized moment table h_0..h_L for one measure; h_{-l} = h_l always,
// and the discrete moments are 2m-periodic, so only l = 0..m is stored in
// the discrete case.
class MomentSequence {
public:
    static MomentSequence discrete(int m, const BigReal& t, mpfr_prec_t prec_bits);
    static MomentSequence continuous(const BigReal& t, long max_ell, mpfr_prec_t prec_bits);
    static MomentSequence discrete(int m, double t, mpfr_prec_t prec_bits);
    static MomentSequence continuous(double t, long max_ell, mpfr_prec_t prec_bits);

    const BigReal& at(long ell) const;

    MeasureKind kind() const { return kind_; }
    int num_atoms_half() const { return m_; }  // m; 2m atoms (discrete only)
    double t() const { return t_; }
    mpfr_prec_t prec_bits() const { return prec_; }
    long max_ell() const { return static_cast<long>(h_.size()) - 1; }

private:
    MeasureKind kind_ = MeasureKind::Continuous;
    int m_ = 0;
    double t_ = 0;
    mpfr_prec_t prec_ = 64;
    std::vector<BigReal> h_;
};

}  // namespace matchstat
