#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "matchstat/distributions.hpp"

using namespace matchstat;

namespace {

std::vector<StatTable> tables_up_to(int n_max) {
    std::vector<StatTable> t;
    t.push_back(StatTable{0, {1}});
    for (int n = 1; n <= n_max; n++) t.push_back(joint_count_table(n));
    return t;
}

}  // namespace

TEST_CASE("joint cdf trivial and symmetric cases") {
    for (double t : {0.0, 0.7, 1.4}) {
        const DistributionPoint p = joint_cdf(t, 5, 0, 80);
        CHECK(p.value.to_double() == doctest::Approx(std::exp(-t * t / 2)).epsilon(1e-15));
    }
    const DistributionPoint a = joint_cdf(1.2, 2, 5, 100);
    const DistributionPoint b = joint_cdf(1.2, 5, 2, 100);
    CHECK(abs(a.value - b.value).to_double() < 1e-25);
}

TEST_CASE("joint cdf equals the truncated Poisson sum") {
    const auto tables = tables_up_to(8);
    const DistributionPoint det = joint_cdf(0.5, 3, 2, 100);
    const TruncatedValue ps = joint_cdf_poisson(0.5, 3, 2, tables, 256);
    CHECK(abs(det.value - ps.value).to_double() <
          ps.tail_bound.to_double() + 1e-10);
    CHECK(abs(det.value - ps.value).to_double() < 1e-8);
}

TEST_CASE("nesting marginal is the k limit of the joint law") {
    const DistributionPoint m = nes_marginal_cdf(0.5, 2, 120);
    const DistributionPoint j40 = joint_cdf(0.5, 40, 2, 120);
    CHECK(abs(m.value - j40.value).to_double() < 1e-20);

    CHECK(nes_marginal_cdf(0.9, 0, 80).value.to_double() ==
          doctest::Approx(std::exp(-0.9 * 0.9 / 2)).epsilon(1e-15));

    double prev = 0;
    for (int j = 0; j <= 6; j++) {
        const double v = nes_marginal_cdf(1.0, j, 80).value.to_double();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("joint law is dominated by both marginals") {
    for (int k = 1; k <= 4; k++) {
        for (int j = 1; j <= 4; j++) {
            const double joint = joint_cdf(1.0, k, j, 80).value.to_double();
            const double mk = nes_marginal_cdf(1.0, k, 80).value.to_double();
            const double mj = nes_marginal_cdf(1.0, j, 80).value.to_double();
            CHECK(joint <= std::min(mk, mj) + 1e-20);
        }
    }
}

TEST_CASE("permutation length law") {
    for (double t : {0.4, 1.0}) {
        CHECK(lis_length_cdf(t, 0, 80).value.to_double() ==
              doctest::Approx(std::exp(-t * t)).epsilon(1e-15));
    }
    CHECK(1.0 - lis_length_cdf(1.0, 20, 100).value.to_double() < 1e-20);
}

TEST_CASE("quadrature route equals the determinant route") {
    struct Case {
        double t;
        int k, j;
    };
    for (const Case c : {Case{1, 3, 2}, Case{2, 4, 3}}) {
        const BigReal quad = log_joint_cdf_quadrature(c.t, c.k, c.j, 256);
        const DistributionPoint det = joint_cdf(c.t, c.k, c.j, 120);
        CHECK(std::fabs((quad - log(det.value)).to_double()) < 1e-8);
    }
    // continuous analogue
    const BigReal quad = log_marginal_cdf_quadrature(2.0, 3, 256);
    const DistributionPoint det = nes_marginal_cdf(2.0, 3, 120);
    CHECK(std::fabs((quad - log(det.value)).to_double()) < 1e-8);

    // t = 0 is log of probability 1
    CHECK(log_joint_cdf_quadrature(0.0, 3, 2, 256).to_double() == 0.0);
}

TEST_CASE("three routes agree at one point") {
    const auto tables = tables_up_to(8);
    const double det = joint_cdf(0.5, 2, 2, 120).value.to_double();
    const double quad = std::exp(log_joint_cdf_quadrature(0.5, 2, 2, 256).to_double());
    const double pois = joint_cdf_poisson(0.5, 2, 2, tables, 256).value.to_double();
    CHECK(std::fabs(det - quad) < 1e-8);
    CHECK(std::fabs(det - pois) < 1e-8);
}

TEST_CASE("flow identities with second-order step shrinkage") {
    struct Setup {
        MeasureKind kind;
        int m;
    };
    for (const Setup s : {Setup{MeasureKind::Continuous, 0}, Setup{MeasureKind::Discrete, 8}}) {
        const FlowIdentityReport big = flow_identity_report(s.kind, s.m, 1.0, 6, 1e-4, 256);
        const FlowIdentityReport small = flow_identity_report(s.kind, s.m, 1.0, 6, 5e-5, 256);
        CHECK(big.reflection_ode < 1e-6);
        CHECK(big.log_norm_ode < 1e-6);
        CHECK(big.h_identity < 1e-6);
        CHECK(big.second_log_det < 1e-6);
        CHECK(big.reflection_ode / small.reflection_ode == doctest::Approx(4.0).epsilon(0.15));
        CHECK(big.log_norm_ode / small.log_norm_ode == doctest::Approx(4.0).epsilon(0.15));
        CHECK(big.h_identity / small.h_identity == doctest::Approx(4.0).epsilon(0.15));
        CHECK(big.second_log_det / small.second_log_det == doctest::Approx(4.0).epsilon(0.15));
    }
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(joint_cdf(-1.0, 2, 2, 80), ValidationError);
    CHECK_THROWS_AS(joint_cdf(1.0, -1, 2, 80), ValidationError);
    CHECK_THROWS_AS(log_joint_cdf_quadrature(1.0, 0, 2, 128), SingularityError);
    CHECK_THROWS_AS(flow_identity_report(MeasureKind::Continuous, 0, 1.0, 6, 2.0, 128),
                    ValidationError);
}
