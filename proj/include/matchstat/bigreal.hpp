#pragma once

#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

namespace matchstat {

// Arbitrary-precision real with value semantics on top of MPFR.  Each value
// carries its own precision; binary operations round to the larger operand
// precision.  Sized determinant entries like e^{2t} combined with results in
// [0,1] need the headroom, so everything downstream of the moment layer works
// in BigReal until a final to_double().
class BigReal {
public:
    explicit BigReal(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigReal(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
    BigReal(long x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
    BigReal(int x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }

    BigReal(const BigReal& o) { mpfr_init2(v_, o.prec()); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigReal(BigReal&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
    BigReal& operator=(const BigReal& o) {
        if (this != &o) { mpfr_set_prec(v_, o.prec()); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    BigReal& operator=(BigReal&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigReal() { mpfr_clear(v_); }

    static BigReal from_string(const std::string& s, mpfr_prec_t prec) {
        BigReal r(prec);
        mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN);
        return r;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // Decimal string with enough digits to round-trip at this precision.
    std::string to_string() const;
    // Decimal string with a fixed number of significant digits.
    std::string to_string(int digits) const;

    friend BigReal operator+(const BigReal& a, const BigReal& b) {
        BigReal r(joint_prec(a, b)); mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigReal operator-(const BigReal& a, const BigReal& b) {
        BigReal r(joint_prec(a, b)); mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigReal operator*(const BigReal& a, const BigReal& b) {
        BigReal r(joint_prec(a, b)); mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigReal operator/(const BigReal& a, const BigReal& b) {
        BigReal r(joint_prec(a, b)); mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigReal operator-(const BigReal& a) {
        BigReal r(a.prec()); mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r;
    }
    BigReal& operator+=(const BigReal& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigReal& operator-=(const BigReal& b) { mpfr_sub(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigReal& operator*=(const BigReal& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigReal& operator/=(const BigReal& b) { mpfr_div(v_, v_, b.v_, MPFR_RNDN); return *this; }

    friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_); }

private:
    static mpfr_prec_t joint_prec(const BigReal& a, const BigReal& b) {
        return std::max(a.prec(), b.prec());
    }
    mpfr_t v_;
};

inline BigReal abs(const BigReal& a) {
    BigReal r(a.prec()); mpfr_abs(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal sqrt(const BigReal& a) {
    BigReal r(a.prec()); mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal exp(const BigReal& a) {
    BigReal r(a.prec()); mpfr_exp(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal log(const BigReal& a) {
    BigReal r(a.prec()); mpfr_log(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal cos(const BigReal& a) {
    BigReal r(a.prec()); mpfr_cos(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal sin(const BigReal& a) {
    BigReal r(a.prec()); mpfr_sin(r.raw(), a.raw(), MPFR_RNDN); return r;
}
inline BigReal pow_ui(const BigReal& a, unsigned long e) {
    BigReal r(a.prec()); mpfr_pow_ui(r.raw(), a.raw(), e, MPFR_RNDN); return r;
}
inline BigReal pi(mpfr_prec_t prec) {
    BigReal r(prec); mpfr_const_pi(r.raw(), MPFR_RNDN); return r;
}
inline BigReal ldexp2(const BigReal& a, long e) {  // a * 2^e, exact
    BigReal r(a.prec()); mpfr_mul_2si(r.raw(), a.raw(), e, MPFR_RNDN); return r;
}

// |a - b| < 2^-bits ?
inline bool agree_abs(const BigReal& a, const BigReal& b, long bits) {
    BigReal d = abs(a - b);
    if (d.is_zero()) return true;
    return mpfr_cmp_si_2exp(d.raw(), 1, -bits) < 0;
}

}  // namespace matchstat
