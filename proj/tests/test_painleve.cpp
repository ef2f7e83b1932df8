#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "matchstat/painleve.hpp"

using namespace matchstat;

namespace {

const HmSolution& hm() {
    static HmSolution s = solve_hastings_mcleod();
    return s;
}

// Simpson integral of f over [a,b].
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) n++;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; i++) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("airy values") {
    CHECK(airy_ai(0.0) == doctest::Approx(0.3550280538878172).epsilon(1e-14));
    CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.2588194037928068).epsilon(1e-14));
    CHECK(airy_ai(6.0) == doctest::Approx(9.947694360252889e-06).epsilon(1e-12));
    CHECK(airy_ai(10.0) == doctest::Approx(1.1047532552898686e-10).epsilon(1e-12));
    CHECK(airy_ai(-1.0) == doctest::Approx(0.5355608832923521).epsilon(1e-12));
}

TEST_CASE("hastings-mcleod boundary and interior pins") {
    const HmSolution& s = hm();
    CHECK(std::fabs(s.q.back() - airy_ai(s.s_max)) < 1e-14);
    CHECK(std::fabs(s.q_at(6.0) - airy_ai(6.0)) < 1e-8);
    CHECK(std::fabs(s.q_at(-10.0) / std::sqrt(5.0) - 1.0) < 1e-2);
    // frozen from the Richardson-doubled solve; agrees with the classical
    // value of the solution at the origin
    CHECK(s.q_at(0.0) == doctest::Approx(0.3670615515480784).epsilon(5e-9));
    CHECK(s.richardson_gap < 1e-9);
}

TEST_CASE("hastings-mcleod invariants") {
    const HmSolution& s = hm();
    CHECK(s.sup_quartic_residual < 1e-8);
    CHECK(s.sup_ode_residual < 1e-6);
    for (int i = 0; i < s.npoints; i++) CHECK(s.q[i] > 0);
    for (int i = 1; i < s.npoints; i++) CHECK(s.u[i] >= s.u[i - 1] - 1e-14);
    CHECK(s.u.back() <= 0);
    CHECK(s.u.back() > -1e-8);
    // u' = q^2 and u'' = 2qq' at interpolation accuracy
    for (double x : {-6.0, -2.0, 0.0, 2.0}) {
        const double d = 1e-5;
        const double up = (s.u_at(x + d) - s.u_at(x - d)) / (2 * d);
        CHECK(std::fabs(up - s.q_at(x) * s.q_at(x)) < 1e-8);
    }
}

TEST_CASE("tracy-widom cdf limits and derivative identities") {
    const HmSolution& s = hm();
    CHECK(1.0 - s.cdf(Ensemble::GOE, 8.0) < 1e-6);
    CHECK(s.cdf(Ensemble::GOE, -10.0) < 1e-6);
    CHECK(1.0 - s.cdf(Ensemble::GUE, 8.0) < 1e-6);

    for (double x : {-3.0, -1.0, 0.0, 1.5}) {
        for (Ensemble e : {Ensemble::GOE, Ensemble::GUE}) {
            const double d1 = 1e-5;
            const double fd1 = (s.cdf(e, x + d1) - s.cdf(e, x - d1)) / (2 * d1);
            CHECK(std::fabs(s.pdf(e, x) / fd1 - 1.0) < 1e-6);
            const double d2 = 1e-3;
            const double fd2 =
                (s.cdf(e, x + d2) - 2 * s.cdf(e, x) + s.cdf(e, x - d2)) / (d2 * d2);
            CHECK(std::fabs(s.pdf_prime(e, x) / fd2 - 1.0) < 1e-6);
        }
    }
    CHECK_THROWS_AS(s.cdf(Ensemble::GOE, 9.5), RangeError);
    CHECK_THROWS_AS(s.pdf(Ensemble::GOE, -11.5), RangeError);
}

TEST_CASE("tracy-widom moments") {
    const TwMoments goe = tw_moments(hm(), Ensemble::GOE);
    CHECK(goe.variance == doctest::Approx(1.6077810345).epsilon(1e-7));
    CHECK(goe.mean == doctest::Approx(-1.2065335745820).epsilon(1e-7));
    const TwMoments gue = tw_moments(hm(), Ensemble::GUE);
    CHECK(gue.variance == doctest::Approx(0.8131947928329).epsilon(1e-7));
    CHECK(gue.mean == doctest::Approx(-1.7710868074110).epsilon(1e-7));
}

TEST_CASE("pair corrections g1, g2 and h") {
    const HmSolution& s = hm();
    for (double y : {-2.0, 0.0, 3.0}) CHECK(pair_g1(s, y, y) == pair_g2(s, y, y));
    CHECK(std::fabs(pair_g1(s, 6.0, 6.0)) < 1e-6);

    // int_0^inf (g1+g2)(x+eta, x'+eta) deta = -(1/2)[u(x)q(x') + q(x)u(x')]
    const double x = 0.0, xp = 0.5;
    const double integral = simpson(
        [&](double eta) { return pair_g1(s, x + eta, xp + eta) + pair_g2(s, x + eta, xp + eta); },
        0.0, 8.0, 4000);
    const double expect = -0.5 * (s.u_at(x) * s.q_at(xp) + s.q_at(x) * s.u_at(xp));
    CHECK(std::fabs(integral - expect) < 1e-6);
}

TEST_CASE("second-order correction identity for the GOE law") {
    // 20 E F = -4F'' - x^2 F'/3 with
    // E = (1/20)[-(u-q)^2 + 2(u'-q') + x^2(u-q)/6]
    const HmSolution& s = hm();
    for (double x = -6.0; x <= 4.0; x += 0.5) {
        const double q = s.q_at(x), u = s.u_at(x);
        const double up = q * q, qp = s.qp_at(x);
        const double e = (-(u - q) * (u - q) + 2 * (up - qp) + x * x * (u - q) / 6.0) / 20.0;
        const double lhs = 20.0 * e * s.cdf(Ensemble::GOE, x);
        const double rhs = -4.0 * s.pdf_prime(Ensemble::GOE, x) -
                           x * x * s.pdf(Ensemble::GOE, x) / 3.0;
        CHECK(std::fabs(lhs - rhs) < 1e-6);
    }
}

TEST_CASE("second-order correction identity for the GUE law") {
    // (u^2 - q^2 - x^2 u/6) F = F'' + x^2 F'/6
    const HmSolution& s = hm();
    for (double x = -6.0; x <= 4.0; x += 0.5) {
        const double q = s.q_at(x), u = s.u_at(x);
        const double lhs =
            (u * u - q * q - x * x * u / 6.0) * s.cdf(Ensemble::GUE, x);
        const double rhs = s.pdf_prime(Ensemble::GUE, x) +
                           x * x * s.pdf(Ensemble::GUE, x) / 6.0;
        CHECK(std::fabs(lhs - rhs) < 1e-6);
    }
}

TEST_CASE("perfect-derivative forms of the marginal corrections") {
    // With an x_t parameter, the order t^-1 terms collapse to derivatives:
    //   U1(eta) = (1/5) d/deta  [ u q - q' + (9 eta - 10 x_t) eta q / 12 ]
    //   U2(eta) = (1/5) d2/deta2[ u^2 - q^2 + (9 eta - 10 x_t) eta u / 6 ]
    // where U1 = h + (3 eta/20 - x_t/6)(q + eta q') and
    //       U2 = 4qh + (3 eta/5 - 2 x_t/3)(eta q' q + q^2) + q q'' - q'^2 - q^4.
    const HmSolution& s = hm();
    const double xt = 0.3;
    auto b1 = [&](double e) {
        return (s.u_at(e) * s.q_at(e) - s.qp_at(e) +
                (9 * e - 10 * xt) * e * s.q_at(e) / 12.0) / 5.0;
    };
    auto b2 = [&](double e) {
        const double q = s.q_at(e), u = s.u_at(e);
        return (u * u - q * q + (9 * e - 10 * xt) * e * u / 6.0) / 5.0;
    };
    for (double eta : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        const double q = s.q_at(eta), qp = s.qp_at(eta), u = s.u_at(eta);
        const double qpp = eta * q + 2 * q * q * q;
        const double u1 = correction_h(s, eta) + (0.15 * eta - xt / 6.0) * (q + eta * qp);
        const double u2 = 4 * q * correction_h(s, eta) +
                          (0.6 * eta - 2.0 * xt / 3.0) * (eta * qp * q + q * q) + q * qpp -
                          qp * qp - q * q * q * q;
        const double d = 1e-4;
        const double fd1 = (b1(eta + d) - b1(eta - d)) / (2 * d);
        const double fd2 = (b2(eta + d) - 2 * b2(eta) + b2(eta - d)) / (d * d);
        CHECK(std::fabs(u1 - fd1) < 1e-6);
        CHECK(std::fabs(u2 - fd2) < 1e-5);
    }
}

TEST_CASE("series coefficients decay like the residue expansion demands") {
    // alpha and beta feed the third-order term; qualitatively they must
    // decay once q does
    const HmSolution& s = hm();
    CHECK(std::fabs(s.alpha_at(6.0)) < 1e-4);
    CHECK(std::fabs(s.beta_at(6.0)) < 1e-3);
    CHECK(std::fabs(s.alpha_at(6.0)) < std::fabs(s.alpha_at(2.0)));
    CHECK(std::fabs(s.beta_at(6.0)) < std::fabs(s.beta_at(2.0)));
    // beta has the closed form q'u - q(s + q^2/2 + u^2/2)
    for (double x : {-2.0, 0.0, 2.0}) {
        const double q = s.q_at(x), u = s.u_at(x);
        const double expect = s.qp_at(x) * u - q * (x + q * q / 2 + u * u / 2);
        CHECK(s.beta_at(x) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("cumulative integrator is exact on quintics") {
    const int n = 101;
    const double h = 0.01;
    std::vector<double> v(n);
    for (int i = 0; i < n; i++) {
        const double x = i * h;
        v[i] = std::pow(x, 5) - 2 * std::pow(x, 3) + x;
    }
    const auto c = cumulative_from_right(v, h, 0.0);
    auto exact = [](double x) {
        return (1.0 / 6 - 0.5 + 0.5) - (std::pow(x, 6) / 6 - std::pow(x, 4) / 2 + x * x / 2);
    };
    for (int i = 0; i < n; i += 10) CHECK(std::fabs(c[i] - exact(i * h)) < 1e-14);
}

TEST_CASE("solver input validation") {
    CHECK_THROWS_AS(solve_hastings_mcleod(-3.0, 10.0), ValidationError);
    CHECK_THROWS_AS(solve_hastings_mcleod(-12.0, 10.0, 100), ValidationError);
}
