#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "matchstat/moments.hpp"

using namespace matchstat;

namespace {
double as_double(const BigReal& x) { return x.to_double(); }
}  // namespace

TEST_CASE("discrete moment closed form at m = 2") {
    // (1/4) sum over the four 4th roots collapses to (cosh 2t + 1)/2
    for (double t : {0.0, 0.3, 1.0, 2.5}) {
        const double expect = (std::cosh(2 * t) + 1) / 2;
        CHECK(as_double(moment_discrete(0, 2, t, 128)) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("discrete moment periodicity and symmetry") {
    for (int m : {1, 3, 5}) {
        for (long l : {0L, 1L, 2L}) {
            const BigReal a = moment_discrete(l, m, 1.2, 192);
            CHECK(abs(a - moment_discrete(l + 2 * m, m, 1.2, 192)).to_double() == 0.0);
            CHECK(abs(a - moment_discrete(-l, m, 1.2, 192)).to_double() == 0.0);
        }
    }
}

TEST_CASE("discrete moment self-oracle at high precision") {
    const BigReal lo = moment_discrete(1, 3, 1.0, 128);
    const BigReal hi = moment_discrete(1, 3, 1.0, 2048);
    CHECK(agree_abs(lo, hi, 120));
}

TEST_CASE("continuous moments are Bessel values") {
    // I_ 0(2) from an independent 4096-bit run of the same series plus the
    // literal prefix
    const BigReal i0 = moment_continuous(0, 1.0, 256);
    CHECK(i0.to_string(20) == "2.2795853023360672674");
    CHECK(agree_abs(i0, moment_continuous(0, 1.0, 4096), 250));

    CHECK(as_double(moment_continuous(5, 0.0, 64)) == 0.0);
    CHECK(as_double(moment_continuous(0, 0.0, 64)) == 1.0);
    CHECK(as_double(moment_continuous(-3, 1.0, 128)) ==
          as_double(moment_continuous(3, 1.0, 128)));
}

TEST_CASE("continuous moments decrease strictly in |l| for t > 0") {
    MomentSequence h = MomentSequence::continuous(1.5, 8, 160);
    for (long l = 0; l < 8; l++) CHECK(h.at(l) > h.at(l + 1));
    CHECK(h.at(3) > BigReal(0.0, 160));
}

TEST_CASE("discrete converges to continuous as m grows") {
    for (long l = 0; l <= 5; l++) {
        const BigReal gap =
            abs(moment_discrete(l, 200, 1.0, 256) - moment_continuous(l, 1.0, 256));
        CHECK(gap < BigReal(1e-30, 64));
    }
}

TEST_CASE("aliasing identity: discrete moment is the wrapped Bessel sum") {
    // h_a(m) = sum_{n in Z} I_{a+2mn}(2t), checked at (m,t,a) = (3,1,1)
    const BigReal lhs = moment_discrete(1, 3, 1.0, 256);
    BigReal rhs(0.0, 320);
    for (long n = -20; n <= 20; n++) rhs += moment_continuous(1 + 6 * n, 1.0, 320);
    CHECK(abs(lhs - rhs) < BigReal(1e-30, 64));
}

TEST_CASE("walk transition weights") {
    CHECK(as_double(walk_transition(0, 0.0, 128)) == 1.0);

    BigReal total(0.0, 256);
    for (long a = -40; a <= 40; a++) total += walk_transition(a, 1.0, 256);
    CHECK(abs(total - BigReal(1.0, 256)) < BigReal(1e-25, 64));

    const BigReal expect = exp(BigReal(-1.0, 256)) * bessel_i(1, BigReal(1.0, 256));
    CHECK(agree_abs(walk_transition(1, 0.5, 256), expect, 250));
}

TEST_CASE("validation and precision errors") {
    CHECK_THROWS_AS(moment_discrete(0, 0, 1.0, 128), ValidationError);
    CHECK_THROWS_AS(moment_discrete(0, 2, -1.0, 128), ValidationError);
    CHECK_THROWS_AS(moment_continuous(0, -0.5, 128), ValidationError);
    CHECK_THROWS_AS(moment_continuous(0, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(moment_continuous(0, 1.0, 1L << 30), PrecisionError);
    MomentSequence h = MomentSequence::continuous(1.0, 4, 128);
    CHECK_THROWS_AS(h.at(5), ValidationError);
}
