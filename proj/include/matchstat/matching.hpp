#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "matchstat/errors.hpp"

namespace matchstat {

// A complete matching of [2n]: n arcs (opener, closer), 1-based, opener <
// closer, stored sorted by opener.  The canonical form is unique, so equality
// of matchings is equality of the arc vectors.
struct Matching {
    int n = 0;
    std::vector<std::pair<int, int>> arcs;

    // Validates the endpoint partition and returns the canonical form.
    static Matching from_arcs(std::vector<std::pair<int, int>> arcs);
};

// Largest k such that the matching contains k arcs with all openers before
// all closers and both increasing (a k-crossing).
//
// Separator sweep: any k-crossing a_1<...<a_k<b_1<...<b_k straddles the
// separator p = b_1 (every opener < p, every closer >= p), and conversely a
// chain of arcs straddling a common p with openers and closers both strictly
// increasing is a genuine crossing, since all its openers are < p <= its
// smallest closer.  The optimal p can be taken to be the smallest closer of a
// maximal chain, so sweeping p over the n closers suffices.  Per separator
// the best chain is a longest strictly increasing subsequence of closers with
// arcs scanned in opener order.
int max_crossing(const Matching& m);

// Largest k such that k arcs are totally ordered by containment: with arcs in
// opener order this is the longest strictly decreasing subsequence of closers.
int max_nesting(const Matching& m);

// (2n-1)!! = number of complete matchings of [2n]; n <= 33 fits in 64 bits.
std::uint64_t odd_double_factorial(int n);

// n-th Catalan number (n <= 33).
std::uint64_t catalan(int n);

constexpr int kMaxEnumerationN = 9;

// Visits every matching of [2n] exactly once, in the canonical order that
// pairs the smallest free point with each larger free point in turn.
// Throws CapacityError outside 1 <= n <= kMaxEnumerationN.
void enumerate_matchings(int n, const std::function<void(const Matching&)>& visit);

// Cumulative joint counts g[k][j] = #{ matchings with max_crossing <= k and
// max_nesting <= j }, 0 <= k, j <= n.
struct StatTable {
    int n = 0;
    std::vector<std::uint64_t> g;  // (n+1) x (n+1), row = crossing bound k

    std::uint64_t at(int k, int j) const {
        if (k < 0 || j < 0) return 0;
        if (k > n) k = n;
        if (j > n) j = n;
        return g[static_cast<std::size_t>(k) * (n + 1) + j];
    }
    std::string to_csv() const;
};

StatTable joint_count_table(int n);         // OpenMP over first-arc subtrees
StatTable joint_count_table_serial(int n);  // reference implementation

// Exact covariance and correlation of (max_crossing, max_nesting) under the
// uniform measure.  Correlation is exact as well because the joint law is
// symmetric, hence Var(cro) = Var(nes) and rho = Cov/Var.  degenerate is set
// when the variance vanishes (n = 1) and the correlation is undefined.
struct CovCor {
    mpq_class covariance;
    mpq_class correlation;
    bool degenerate = false;
};

CovCor exact_cov_cor(int n);
CovCor exact_cov_cor(const StatTable& table);

// Rational -> decimal string with the given number of significant digits.
std::string rational_to_decimal(const mpq_class& q, int significant_digits);

// Uniform random matching: pair the smallest free point with a uniformly
// chosen other free point.  Deterministic given (n, seed, stream).
Matching sample_matching(int n, std::uint64_t seed, std::uint64_t stream = 0);

// (stat - sqrt(2n)) / (2^-1 (2n)^(1/6))
double scale_stat(int stat, int n);

struct McCovariance {
    double estimate = 0.0;  // sample covariance of the scaled pair
    double stderr_jackknife = 0.0;
    int reps = 0;
};

// Monte Carlo covariance of the scaled (crossing, nesting) pair over
// independent samples; replica r draws from stream r+1 of the seed, so the
// result is identical for any thread count.
McCovariance mc_scaled_covariance(int n, int reps, std::uint64_t seed);
McCovariance mc_scaled_covariance_serial(int n, int reps, std::uint64_t seed);

// Entrywise check of g_{k,j}(n+1) <= (2n+1) g_{k,j}(n); requires n+1 within
// enumeration capacity.
bool monotonicity_check(int n);
bool monotonicity_check(const StatTable& at_n, const StatTable& at_n_plus_1);

// De-Poissonization sandwich around a_i = g_{k,j}(i)/(2i-1)!!.  With
// mu_n = n + 2 sqrt(s n log n) and nu_n = n - 2 sqrt(s n log n), a
// nonincreasing a in [0,1] satisfies
//     phi(sqrt(mu_n)) - n^-s <= a_n <= phi(sqrt(nu_n)) + n^-s
// where phi(u) = e^{-u^2} sum_i u^{2i}/i! a_i.  Tables only reach n_max, so
// phi is bracketed by [phi_lo, phi_hi]: the truncated sum with the unknown
// tail weighted by 0 resp. a_{n_max} (valid by monotonicity).  nu_n <= 0 for
// the accessible n, where the upper bound is vacuous (phi(0) = 1).
struct SandwichCell {
    int k = 0, j = 0;
    bool lower_verified = false;  // phi_hi(sqrt(mu_n)) - n^-s <= a_n
    bool lower_refuted = false;   // phi_lo(sqrt(mu_n)) - n^-s >  a_n
    bool upper_verified = false;
    bool upper_refuted = false;
};

std::vector<SandwichCell> depoissonization_sandwich(const std::vector<StatTable>& tables,
                                                    int n, double s);

std::string table1_csv(int n_max);  // columns: 2n,count,covariance,correlation

}  // namespace matchstat
