#include "matchstat/moments.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace matchstat {

namespace {

constexpr mpfr_prec_t kGuardBits = 64;
constexpr mpfr_prec_t kMaxPrec = mpfr_prec_t(1) << 24;

mpfr_prec_t checked_working_prec(mpfr_prec_t prec_bits) {
    if (prec_bits < 2) throw ValidationError("prec_bits must be >= 2");
    if (prec_bits > kMaxPrec)
        throw PrecisionError("requested precision exceeds ceiling", kMaxPrec);
    return prec_bits + kGuardBits;
}

BigReal rounded_to(const BigReal& x, mpfr_prec_t prec_bits) {
    BigReal r(prec_bits);
    mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

}  // namespace

BigReal bessel_i(long nu, const BigReal& x) {
    if (nu < 0) nu = -nu;
    const mpfr_prec_t wp = x.prec();
    if (x.is_zero()) return BigReal(nu == 0 ? 1.0 : 0.0, wp);

    BigReal half_x = ldexp2(x, -1);  // t = x/2
    BigReal t2 = half_x * half_x;

    // term_0 = t^nu / nu!
    BigReal term = pow_ui(half_x, static_cast<unsigned long>(nu));
    for (long i = 2; i <= nu; i++) term /= BigReal(i, wp);
    BigReal sum = term;

    const double td = half_x.to_double();
    for (long k = 0;; k++) {
        term *= t2;
        term /= BigReal(k + 1, wp);
        term /= BigReal(k + 1 + nu, wp);
        sum += term;
        // Once the term ratio is below 1/2 the tail is under 2*term.
        const double ratio = td * td / (static_cast<double>(k + 2) * (k + 2 + nu));
        if (ratio < 0.5) {
            BigReal tail = ldexp2(term, 1);
            if (tail < ldexp2(abs(sum), -static_cast<long>(wp))) break;
        }
        if (k > 8 * wp + 8 * static_cast<long>(td) + 64)
            throw PrecisionError("Bessel series failed to terminate", 2 * wp);
    }
    return sum;
}

BigReal moment_continuous(long ell, const BigReal& t, mpfr_prec_t prec_bits) {
    if (t.sign() < 0) throw ValidationError("moment_continuous requires t >= 0");
    const mpfr_prec_t wp = checked_working_prec(prec_bits);
    BigReal x(wp);
    mpfr_set(x.raw(), t.raw(), MPFR_RNDN);
    x = ldexp2(x, 1);
    return rounded_to(bessel_i(ell, x), prec_bits);
}

BigReal moment_continuous(long ell, double t, mpfr_prec_t prec_bits) {
    return moment_continuous(ell, BigReal(t, 64), prec_bits);
}

BigReal moment_discrete(long ell, int m, const BigReal& t, mpfr_prec_t prec_bits) {
    if (m < 1) throw ValidationError("moment_discrete requires m >= 1");
    if (t.sign() < 0) throw ValidationError("moment_discrete requires t >= 0");
    const mpfr_prec_t wp = checked_working_prec(prec_bits);

    // Reduce l modulo the 2m-periodicity; evenness folds to 0 <= l <= m.
    long l = ell % (2L * m);
    if (l < 0) l += 2L * m;
    if (l > m) l = 2L * m - l;

    const BigReal pi_over_m = pi(wp) / BigReal(static_cast<long>(m), wp);
    BigReal two_t(wp);
    mpfr_set(two_t.raw(), t.raw(), MPFR_RNDN);
    two_t = ldexp2(two_t, 1);

    // r = 0 and (when even count) r = m terms are unpaired.
    BigReal sum = exp(two_t);
    {
        BigReal e_neg = exp(-two_t);
        if (l % 2 == 1) e_neg = -e_neg;
        sum += e_neg;
    }
    for (int r = 1; r < m; r++) {
        BigReal angle_weight = cos(BigReal(static_cast<long>(r), wp) * pi_over_m);
        BigReal angle_coeff = cos(BigReal(static_cast<long>(r) * l, wp) * pi_over_m);
        sum += ldexp2(angle_coeff * exp(two_t * angle_weight), 1);
    }
    sum /= BigReal(2L * m, wp);
    return rounded_to(sum, prec_bits);
}

BigReal moment_discrete(long ell, int m, double t, mpfr_prec_t prec_bits) {
    return moment_discrete(ell, m, BigReal(t, 64), prec_bits);
}

BigReal walk_transition(long a, double t, mpfr_prec_t prec_bits) {
    if (t < 0) throw ValidationError("walk_transition requires t >= 0");
    const mpfr_prec_t wp = checked_working_prec(prec_bits);
    BigReal x(2.0 * t, wp);
    BigReal r = exp(-x) * bessel_i(a, x);
    return rounded_to(r, prec_bits);
}

MomentSequence MomentSequence::discrete(int m, const BigReal& t, mpfr_prec_t prec_bits) {
    MomentSequence s;
    s.kind_ = MeasureKind::Discrete;
    s.m_ = m;
    s.t_ = t.to_double();
    s.prec_ = prec_bits;
    s.h_.reserve(m + 1);
    for (long l = 0; l <= m; l++) s.h_.push_back(moment_discrete(l, m, t, prec_bits));
    return s;
}

MomentSequence MomentSequence::continuous(const BigReal& t, long max_ell, mpfr_prec_t prec_bits) {
    MomentSequence s;
    s.kind_ = MeasureKind::Continuous;
    s.t_ = t.to_double();
    s.prec_ = prec_bits;
    s.h_.reserve(max_ell + 1);
    for (long l = 0; l <= max_ell; l++) s.h_.push_back(moment_continuous(l, t, prec_bits));
    return s;
}

MomentSequence MomentSequence::discrete(int m, double t, mpfr_prec_t prec_bits) {
    return discrete(m, BigReal(t, 64), prec_bits);
}

MomentSequence MomentSequence::continuous(double t, long max_ell, mpfr_prec_t prec_bits) {
    return continuous(BigReal(t, 64), max_ell, prec_bits);
}

const BigReal& MomentSequence::at(long ell) const {
    long l = std::labs(ell);
    if (kind_ == MeasureKind::Discrete) {
        l %= 2L * m_;
        if (l > m_) l = 2L * m_ - l;
    }
    if (l >= static_cast<long>(h_.size()))
        throw ValidationError("moment index " + std::to_string(ell) + " outside materialized range");
    return h_[static_cast<std::size_t>(l)];
}

}  // namespace matchstat
