#include "matchstat/opuc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace matchstat {

namespace {

constexpr long kPrecCeiling = 1L << 20;

bool relative_agree(const BigReal& a, const BigReal& b, long bits) {
    BigReal diff = abs(a - b);
    if (diff.is_zero()) return true;
    BigReal scale = abs(b);
    if (scale.is_zero()) return agree_abs(a, b, bits);
    return diff < ldexp2(scale, -bits);
}

template <typename Eval>
Certified certify(Eval&& eval, mpfr_prec_t start_prec, long tol_bits) {
    mpfr_prec_t p = std::max<mpfr_prec_t>(start_prec, 64);
    BigReal prev = eval(p);
    for (;;) {
        if (2 * p > kPrecCeiling)
            throw PrecisionError("stability certificate not reached below precision ceiling",
                                 2 * p);
        p *= 2;
        BigReal next = eval(p);
        if (relative_agree(prev, next, tol_bits)) {
            Certified c{std::move(next), p, tol_bits};
            return c;
        }
        prev = std::move(next);
    }
}

}  // namespace

mpfr_prec_t det_start_prec(double t, int n) {
    const double bits = 8.0 * t + 16.0 * n;
    return std::max<mpfr_prec_t>(256, static_cast<mpfr_prec_t>(bits) + 64);
}

BigReal lu_determinant(std::vector<BigReal> a, int n) {
    if (n == 0) return BigReal(1.0, 64);
    const mpfr_prec_t wp = a[0].prec();
    BigReal det(1.0, wp);
    int sign = 1;
    for (int col = 0; col < n; col++) {
        int pivot = col;
        for (int r = col + 1; r < n; r++)
            if (abs(a[r * n + col]) > abs(a[pivot * n + col])) pivot = r;
        if (a[pivot * n + col].is_zero()) return BigReal(0.0, wp);
        if (pivot != col) {
            sign = -sign;
            for (int c = col; c < n; c++) std::swap(a[pivot * n + c], a[col * n + c]);
        }
        det *= a[col * n + col];
        for (int r = col + 1; r < n; r++) {
            BigReal factor = a[r * n + col] / a[col * n + col];
            for (int c = col + 1; c < n; c++) a[r * n + c] -= factor * a[col * n + c];
        }
    }
    if (sign < 0) det = -det;
    return det;
}

namespace {

BigReal toeplitz_det_at(MeasureKind kind, int m, double t, int n, mpfr_prec_t prec) {
    if (n == 0) return BigReal(1.0, prec);
    MomentSequence h = (kind == MeasureKind::Discrete)
                           ? MomentSequence::discrete(m, t, prec)
                           : MomentSequence::continuous(t, n, prec);
    std::vector<BigReal> a;
    a.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; r++)
        for (int c = 0; c < n; c++) a.push_back(h.at(r - c));
    return lu_determinant(std::move(a), n);
}

BigReal th_det_at(MeasureKind kind, int m, double t, int j, mpfr_prec_t prec) {
    if (j == 0) return BigReal(1.0, prec);
    MomentSequence h = (kind == MeasureKind::Discrete)
                           ? MomentSequence::discrete(m, t, prec)
                           : MomentSequence::continuous(t, 2L * j, prec);
    std::vector<BigReal> a;
    a.reserve(static_cast<std::size_t>(j) * j);
    for (int r = 1; r <= j; r++)
        for (int c = 1; c <= j; c++) a.push_back(h.at(r - c) - h.at(r + c));
    return lu_determinant(std::move(a), j);
}

BigReal sine_det_at(int m, double t, int j, mpfr_prec_t prec) {
    if (j == 0) return BigReal(1.0, prec);
    const mpfr_prec_t wp = prec + 64;
    const BigReal pi_over_m = pi(wp) / BigReal(static_cast<long>(m), wp);
    const BigReal two_t(2.0 * t, wp);

    std::vector<BigReal> weight;  // e^{2t cos(pi r/m)}
    std::vector<BigReal> sines;   // sin(pi r a / m), r-major
    weight.reserve(2 * m);
    sines.reserve(static_cast<std::size_t>(2 * m) * j);
    for (int r = 0; r < 2 * m; r++) {
        BigReal rr(static_cast<long>(r), wp);
        weight.push_back(exp(two_t * cos(rr * pi_over_m)));
        for (int a = 1; a <= j; a++)
            sines.push_back(sin(BigReal(static_cast<long>(r) * a, wp) * pi_over_m));
    }

    std::vector<BigReal> mat;
    mat.reserve(static_cast<std::size_t>(j) * j);
    for (int a = 1; a <= j; a++) {
        for (int b = 1; b <= j; b++) {
            BigReal sum(0.0, wp);
            for (int r = 0; r < 2 * m; r++)
                sum += sines[static_cast<std::size_t>(r) * j + (a - 1)] *
                       sines[static_cast<std::size_t>(r) * j + (b - 1)] * weight[r];
            mat.push_back(sum / BigReal(static_cast<long>(m), wp));
        }
    }
    return lu_determinant(std::move(mat), j);
}

}  // namespace

Certified toeplitz_det(MeasureKind kind, int m, double t, int n, long tol_bits) {
    if (n < 0) throw ValidationError("toeplitz_det requires n >= 0");
    if (t < 0) throw ValidationError("toeplitz_det requires t >= 0");
    // size n corresponds to level j ~ n/2 of the size heuristic
    return certify([&](mpfr_prec_t p) { return toeplitz_det_at(kind, m, t, n, p); },
                   det_start_prec(t, (n + 1) / 2), tol_bits);
}

Certified toeplitz_minus_hankel_det(MeasureKind kind, int m, double t, int j, long tol_bits) {
    if (j < 0) throw ValidationError("toeplitz_minus_hankel_det requires j >= 0");
    if (t < 0) throw ValidationError("toeplitz_minus_hankel_det requires t >= 0");
    if (kind == MeasureKind::Discrete && j > m - 1)
        throw SingularityError("discrete measure supports j <= m-1");
    return certify([&](mpfr_prec_t p) { return th_det_at(kind, m, t, j, p); },
                   det_start_prec(t, j), tol_bits);
}

Certified crossing_det_sine_form(int m, double t, int j, long tol_bits) {
    if (j < 0 || m < 1) throw ValidationError("crossing_det_sine_form requires j >= 0, m >= 1");
    return certify([&](mpfr_prec_t p) { return sine_det_at(m, t, j, p); },
                   det_start_prec(t, j), tol_bits);
}

BigReal OpucSequence::log_toeplitz(int j) const {
    if (j > nmax + 1) throw ValidationError("log_toeplitz needs norms up to j-1");
    BigReal sum(0.0, prec_bits);
    for (int n = 0; n < j; n++) sum += log(norm[n]);
    return sum;
}

BigReal OpucSequence::log_toeplitz_minus_hankel(int j) const {
    if (2 * j > nmax) throw ValidationError("log_toeplitz_minus_hankel needs norms up to 2j");
    BigReal sum(0.0, prec_bits);
    const BigReal one(1.0, prec_bits);
    for (int n = 1; n <= j; n++) {
        sum += log(norm[2 * n]);
        sum -= log(one - reflection[2 * n]);
    }
    return sum;
}

OpucSequence levinson(const MomentSequence& h, int nmax) {
    if (nmax < 0) throw ValidationError("levinson requires nmax >= 0");
    if (h.kind() == MeasureKind::Discrete && nmax > 2 * h.num_atoms_half() - 1)
        throw SingularityError("discrete measure defines polynomials only up to degree 2m-1");
    if (h.kind() == MeasureKind::Continuous && h.max_ell() < nmax)
        throw ValidationError("moment table too short for requested degree");

    const mpfr_prec_t wp = h.prec_bits();
    OpucSequence seq;
    seq.kind = h.kind();
    seq.m = h.num_atoms_half();
    seq.t = h.t();
    seq.nmax = nmax;
    seq.prec_bits = wp;
    seq.reflection.reserve(nmax + 1);
    seq.norm.reserve(nmax + 1);

    const BigReal one(1.0, wp);
    std::vector<BigReal> coeff;  // pi_n by ascending powers; monic
    coeff.push_back(one);
    seq.reflection.push_back(one);
    seq.norm.push_back(h.at(0));
    if (!(seq.norm[0] > BigReal(0.0, wp)))
        throw SingularityError("h_0 must be positive");

    for (int n = 0; n < nmax; n++) {
        // <z pi_n, 1> = sum_i c_i h_{i+1}
        BigReal ip(0.0, wp);
        for (int i = 0; i <= n; i++) ip += coeff[i] * h.at(i + 1);
        BigReal refl = -(ip / seq.norm[n]);

        // pi_{n+1} = z pi_n + refl * pi*_n  (pi*_n has the reversed coefficients)
        std::vector<BigReal> next(static_cast<std::size_t>(n) + 2, BigReal(0.0, wp));
        for (int i = 0; i <= n; i++) {
            next[i + 1] = coeff[i];
            next[i] += refl * coeff[n - i];
        }
        coeff = std::move(next);

        BigReal norm_next = seq.norm[n] * (one - refl * refl);
        const bool refl_bounded = abs(refl) < one;
        const bool bound_required =
            seq.kind == MeasureKind::Continuous || n + 1 <= 2 * seq.m - 1;
        if (bound_required && (!refl_bounded || !(norm_next > BigReal(0.0, wp))))
            throw SingularityError("reflection coefficient left (-1,1) at degree " +
                                   std::to_string(n + 1) +
                                   "; degree exceeds the measure's support");
        seq.reflection.push_back(std::move(refl));
        seq.norm.push_back(std::move(norm_next));
    }
    return seq;
}

OpucSequence levinson(MeasureKind kind, int m, const BigReal& t, int nmax, mpfr_prec_t prec_bits) {
    MomentSequence h = (kind == MeasureKind::Discrete)
                           ? MomentSequence::discrete(m, t, prec_bits)
                           : MomentSequence::continuous(t, nmax + 1, prec_bits);
    return levinson(h, nmax);
}

OpucSequence levinson(MeasureKind kind, int m, double t, int nmax, mpfr_prec_t prec_bits) {
    return levinson(kind, m, BigReal(t, 64), nmax, prec_bits);
}

OpucSequence levinson_certified(MeasureKind kind, int m, double t, int nmax, long tol_bits) {
    mpfr_prec_t p = det_start_prec(t, nmax);
    OpucSequence prev = levinson(kind, m, t, nmax, p);
    for (;;) {
        if (2 * p > kPrecCeiling)
            throw PrecisionError("levinson certificate not reached below precision ceiling",
                                 2 * p);
        p *= 2;
        OpucSequence next = levinson(kind, m, t, nmax, p);
        bool ok = true;
        for (int n = 0; n <= nmax && ok; n++)
            ok = agree_abs(prev.reflection[n], next.reflection[n], tol_bits);
        if (ok) return next;
        prev = std::move(next);
    }
}

}  // namespace matchstat
