#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "matchstat/opuc.hpp"

using namespace matchstat;

namespace {

// Cofactor-expansion determinant, independent of the LU path.
BigReal cofactor_det(const std::vector<BigReal>& a, int n) {
    if (n == 0) return BigReal(1.0, 64);
    if (n == 1) return a[0];
    BigReal det(0.0, a[0].prec());
    for (int col = 0; col < n; col++) {
        std::vector<BigReal> minor;
        minor.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
        for (int r = 1; r < n; r++)
            for (int c = 0; c < n; c++)
                if (c != col) minor.push_back(a[r * n + c]);
        BigReal term = a[col] * cofactor_det(minor, n - 1);
        if (col % 2) term = -term;
        det += term;
    }
    return det;
}

// #permutations of S_n with longest increasing subsequence <= cap, by direct
// enumeration (n <= 8).
long lis_count(int n, int cap) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    long count = 0;
    std::vector<int> tails;
    do {
        tails.clear();
        for (int x : perm) {
            auto it = std::lower_bound(tails.begin(), tails.end(), x);
            if (it == tails.end())
                tails.push_back(x);
            else
                *it = x;
        }
        if (static_cast<int>(tails.size()) <= cap) count++;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

}  // namespace

TEST_CASE("toeplitz determinant basics") {
    CHECK(toeplitz_det(MeasureKind::Continuous, 0, 1.0, 0, 80).value.to_double() == 1.0);
    const Certified t1 = toeplitz_det(MeasureKind::Continuous, 0, 1.0, 1, 80);
    CHECK(agree_abs(t1.value, moment_continuous(0, 1.0, t1.prec_bits), 78));
}

TEST_CASE("toeplitz determinant against a cofactor oracle") {
    const mpfr_prec_t wp = 320;
    MomentSequence h = MomentSequence::continuous(1.0, 3, wp);
    std::vector<BigReal> a;
    for (int r = 0; r < 3; r++)
        for (int c = 0; c < 3; c++) a.push_back(h.at(r - c));
    const BigReal oracle = cofactor_det(a, 3);
    const Certified lu = toeplitz_det(MeasureKind::Continuous, 0, 1.0, 3, 120);
    CHECK(abs(oracle - lu.value) < BigReal(1e-30, 64));
}

TEST_CASE("poissonized permutation length against S_n enumeration") {
    // e^{-t^2} T_l(t) = sum_n P{lis_n <= l} t^{2n}/(n!)^2 e^{-t^2}
    const double t = 0.5;
    const int ell = 3;
    const Certified det = toeplitz_det(MeasureKind::Continuous, 0, t, ell, 100);
    const double lhs = (exp(BigReal(-t * t, 256)) * det.value).to_double();
    double rhs = 0, fact = 1;
    for (int n = 0; n <= 8; n++) {
        if (n > 0) fact *= n;
        const double p_le =
            n == 0 ? 1.0
                   : static_cast<double>(lis_count(n, ell)) / std::tgamma(n + 1.0);
        rhs += p_le * std::pow(t * t, n) / fact * std::exp(-t * t);
    }
    CHECK(std::fabs(lhs - rhs) < 1e-8);
}

TEST_CASE("toeplitz-minus-hankel vs the sine-product form") {
    CHECK(toeplitz_minus_hankel_det(MeasureKind::Discrete, 5, 1.0, 0, 80).value.to_double() ==
          1.0);
    const Certified th = toeplitz_minus_hankel_det(MeasureKind::Discrete, 8, 1.5, 3, 120);
    const Certified sine = crossing_det_sine_form(8, 1.5, 3, 120);
    CHECK(abs(th.value - sine.value) < BigReal(1e-25, 64));
}

TEST_CASE("certified determinants are stable under extra precision") {
    const Certified a = toeplitz_minus_hankel_det(MeasureKind::Continuous, 0, 2.0, 4, 90);
    const Certified b = toeplitz_minus_hankel_det(MeasureKind::Continuous, 0, 2.0, 4, 160);
    BigReal rel = abs(a.value - b.value) / abs(b.value);
    CHECK(rel < ldexp2(BigReal(1.0, 64), -88));
}

TEST_CASE("levinson reflection coefficients") {
    // pi_1(0;t) = -I_1(2t)/I_0(2t) from the 2x2 moment solve
    for (double t : {0.5, 1.0, 2.0}) {
        OpucSequence seq = levinson(MeasureKind::Continuous, 0, t, 4, 256);
        const BigReal expect =
            -(moment_continuous(1, t, 256) / moment_continuous(0, t, 256));
        CHECK(agree_abs(seq.reflection[1], expect, 240));
        CHECK(agree_abs(seq.norm[0], moment_continuous(0, t, 256), 240));
    }

    // t = 0: Lebesgue measure, all reflections vanish
    for (MeasureKind kind : {MeasureKind::Continuous, MeasureKind::Discrete}) {
        OpucSequence seq = levinson(kind, 6, 0.0, 5, 128);
        for (int n = 1; n <= 5; n++) CHECK(seq.reflection[n].to_double() == 0.0);
    }
}

TEST_CASE("norms equal consecutive toeplitz ratios") {
    OpucSequence seq = levinson(MeasureKind::Continuous, 0, 1.0, 7, 512);
    for (int n = 0; n <= 6; n++) {
        const Certified tn = toeplitz_det(MeasureKind::Continuous, 0, 1.0, n, 120);
        const Certified tn1 = toeplitz_det(MeasureKind::Continuous, 0, 1.0, n + 1, 120);
        CHECK(abs(seq.norm[n] - tn1.value / tn.value) < BigReal(1e-25, 64));
    }
}

TEST_CASE("determinants factor over the reflection data") {
    // T_j = prod N_n and H_j = prod N_{2n}(1 - pi_{2n}(0))^{-1}
    for (MeasureKind kind : {MeasureKind::Continuous, MeasureKind::Discrete}) {
        const int m = 12;
        for (double t : {0.5, 1.0, 2.0}) {
            OpucSequence seq = levinson(kind, m, t, 10, 512);
            for (int j = 1; j <= 5; j++) {
                const Certified tj = toeplitz_det(kind, m, t, j, 120);
                CHECK(abs(log(tj.value) - seq.log_toeplitz(j)) < BigReal(1e-25, 64));
                const Certified hj = toeplitz_minus_hankel_det(kind, m, t, j, 120);
                CHECK(abs(log(hj.value) - seq.log_toeplitz_minus_hankel(j)) <
                      BigReal(1e-25, 64));
            }
        }
    }
}

TEST_CASE("discrete reflections approach continuous ones") {
    OpucSequence disc = levinson(MeasureKind::Discrete, 200, 1.0, 6, 320);
    OpucSequence cont = levinson(MeasureKind::Continuous, 0, 1.0, 6, 320);
    for (int n = 1; n <= 6; n++)
        CHECK(abs(disc.reflection[n] - cont.reflection[n]) < BigReal(1e-20, 64));
}

TEST_CASE("reflections stay in (-1,1) and support limits are enforced") {
    OpucSequence seq = levinson(MeasureKind::Continuous, 0, 2.0, 12, 320);
    const BigReal one(1.0, 64);
    for (int n = 1; n <= 12; n++) {
        CHECK(abs(seq.reflection[n]) < one);
        CHECK(seq.norm[n] > BigReal(0.0, 64));
    }
    // discrete support has 2m points: degree 2m is out of range
    CHECK_THROWS_AS(levinson(MeasureKind::Discrete, 2, 1.0, 4, 256), SingularityError);
    OpucSequence edge = levinson(MeasureKind::Discrete, 2, 1.0, 3, 256);
    CHECK(edge.norm[3] > BigReal(0.0, 64));
}

TEST_CASE("big real decimal serialization round-trips") {
    std::vector<double> samples{0.0, 1.0, -1.0 / 3, 6.02e23, -1.1e-30, 3.141592653589793};
    for (double x : samples) {
        BigReal v(x, 192);
        v = v * exp(BigReal(1.0, 192));  // make it non-representable
        BigReal back = BigReal::from_string(v.to_string(), 192);
        CHECK(abs(back - v).to_double() == 0.0);
    }
}
