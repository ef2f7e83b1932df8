#include "matchstat/matching.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "matchstat/rng.hpp"

namespace matchstat {

Matching Matching::from_arcs(std::vector<std::pair<int, int>> arcs) {
    Matching m;
    m.n = static_cast<int>(arcs.size());
    const int two_n = 2 * m.n;
    std::vector<char> seen(static_cast<std::size_t>(two_n) + 1, 0);
    for (auto& [a, b] : arcs) {
        if (a < 1 || b < 1 || a > two_n || b > two_n)
            throw ValidationError("arc endpoint outside [1, 2n]");
        if (a >= b) throw ValidationError("arc opener must precede its closer");
        if (seen[a]++ || seen[b]++) throw ValidationError("endpoint used twice");
    }
    std::sort(arcs.begin(), arcs.end());
    m.arcs = std::move(arcs);
    return m;
}

namespace {

// Longest strictly increasing subsequence length (patience sorting).
int lis_strict(const int* xs, int len, int* tails) {
    int sz = 0;
    for (int i = 0; i < len; i++) {
        int* pos = std::lower_bound(tails, tails + sz, xs[i]);
        *pos = xs[i];
        if (pos == tails + sz) sz++;
    }
    return sz;
}

int max_crossing_impl(const std::pair<int, int>* arcs, int n, int* closers, int* tails) {
    int best = 0;
    for (int s = 0; s < n; s++) {
        const int p = arcs[s].second;
        int len = 0;
        for (int i = 0; i < n; i++)
            if (arcs[i].first < p && p <= arcs[i].second) closers[len++] = arcs[i].second;
        best = std::max(best, lis_strict(closers, len, tails));
    }
    return best;
}

int max_nesting_impl(const std::pair<int, int>* arcs, int n, int* closers, int* tails) {
    // Strictly decreasing subsequence of closers == LIS of the negated values.
    for (int i = 0; i < n; i++) closers[i] = -arcs[i].second;
    return lis_strict(closers, n, tails);
}

}  // namespace

int max_crossing(const Matching& m) {
    if (m.n == 0) return 0;
    std::vector<int> closers(m.n), tails(m.n);
    return max_crossing_impl(m.arcs.data(), m.n, closers.data(), tails.data());
}

int max_nesting(const Matching& m) {
    if (m.n == 0) return 0;
    std::vector<int> closers(m.n), tails(m.n);
    return max_nesting_impl(m.arcs.data(), m.n, closers.data(), tails.data());
}

std::uint64_t odd_double_factorial(int n) {
    std::uint64_t r = 1;
    for (int i = 1; i <= n; i++) r *= static_cast<std::uint64_t>(2 * i - 1);
    return r;
}

std::uint64_t catalan(int n) {
    // C_n = binom(2n, n)/(n+1); build incrementally to stay in 64 bits.
    std::uint64_t c = 1;
    for (int i = 0; i < n; i++) c = c * 2 * (2 * static_cast<std::uint64_t>(i) + 1) / (i + 2);
    return c;
}

namespace {

struct EnumFrame {
    int two_n;
    std::uint32_t used = 0;  // bitmask over points 1..2n (bit i-1)
    std::pair<int, int> arcs[kMaxEnumerationN];
    int depth = 0;
};

template <typename Leaf>
void enumerate_completions(EnumFrame& f, Leaf&& leaf) {
    if (2 * f.depth == f.two_n) {
        leaf(f.arcs, f.depth);
        return;
    }
    const std::uint32_t free_mask = ~f.used & ((1u << f.two_n) - 1);
    const int opener = __builtin_ctz(free_mask) + 1;
    std::uint32_t rest = free_mask & (free_mask - 1);
    while (rest) {
        const int closer = __builtin_ctz(rest) + 1;
        rest &= rest - 1;
        f.used = f.used | (1u << (opener - 1)) | (1u << (closer - 1));
        f.arcs[f.depth] = {opener, closer};
        f.depth++;
        enumerate_completions(f, leaf);
        f.depth--;
        f.used &= ~((1u << (opener - 1)) | (1u << (closer - 1)));
    }
}

void check_enumeration_capacity(int n) {
    if (n < 1 || n > kMaxEnumerationN)
        throw CapacityError("enumeration supports 1 <= n <= " +
                            std::to_string(kMaxEnumerationN) + ", got n = " + std::to_string(n));
}

struct JointHistogram {
    int n;
    std::vector<std::uint64_t> f;  // f[cro * (n+1) + nes]
    explicit JointHistogram(int n_) : n(n_), f(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0) {}
    void merge(const JointHistogram& o) {
        for (std::size_t i = 0; i < f.size(); i++) f[i] += o.f[i];
    }
};

void tally_subtree(EnumFrame& f, int n, JointHistogram& h) {
    int closers[kMaxEnumerationN], tails[kMaxEnumerationN];
    enumerate_completions(f, [&](const std::pair<int, int>* arcs, int depth) {
        const int c = max_crossing_impl(arcs, depth, closers, tails);
        const int v = max_nesting_impl(arcs, depth, closers, tails);
        h.f[static_cast<std::size_t>(c) * (n + 1) + v]++;
    });
}

StatTable cumulate(JointHistogram&& h) {
    StatTable t;
    t.n = h.n;
    t.g = std::move(h.f);
    const int w = t.n + 1;
    for (int k = 0; k < w; k++)
        for (int j = 1; j < w; j++) t.g[k * w + j] += t.g[k * w + j - 1];
    for (int k = 1; k < w; k++)
        for (int j = 0; j < w; j++) t.g[k * w + j] += t.g[(k - 1) * w + j];
    return t;
}

}  // namespace

void enumerate_matchings(int n, const std::function<void(const Matching&)>& visit) {
    check_enumeration_capacity(n);
    EnumFrame f;
    f.two_n = 2 * n;
    Matching m;
    m.n = n;
    enumerate_completions(f, [&](const std::pair<int, int>* arcs, int depth) {
        m.arcs.assign(arcs, arcs + depth);
        visit(m);
    });
}

StatTable joint_count_table_serial(int n) {
    check_enumeration_capacity(n);
    JointHistogram h(n);
    EnumFrame f;
    f.two_n = 2 * n;
    tally_subtree(f, n, h);
    return cumulate(std::move(h));
}

StatTable joint_count_table(int n) {
    check_enumeration_capacity(n);
    if (n < 5) return joint_count_table_serial(n);

    // Point 1 pairs with one of 2n-1 partners; the subtrees are independent
    // and equally sized, so a parallel loop over the first arc is enough.
    const int two_n = 2 * n;
    JointHistogram total(n);
#pragma omp parallel
    {
        JointHistogram local(n);
#pragma omp for schedule(dynamic) nowait
        for (int closer = 2; closer <= two_n; closer++) {
            EnumFrame f;
            f.two_n = two_n;
            f.used = 1u | (1u << (closer - 1));
            f.arcs[0] = {1, closer};
            f.depth = 1;
            tally_subtree(f, n, local);
        }
#pragma omp critical
        total.merge(local);
    }
    return cumulate(std::move(total));
}

std::string StatTable::to_csv() const {
    std::ostringstream out;
    out << "k\\j";
    for (int j = 0; j <= n; j++) out << "," << j;
    out << "\n";
    for (int k = 0; k <= n; k++) {
        out << k;
        for (int j = 0; j <= n; j++) out << "," << at(k, j);
        out << "\n";
    }
    return out.str();
}

CovCor exact_cov_cor(int n) { return exact_cov_cor(joint_count_table(n)); }

CovCor exact_cov_cor(const StatTable& table) {
    const int n = table.n;
    const mpz_class total = mpz_class(static_cast<unsigned long>(odd_double_factorial(n)));

    // Recover point masses f[k][j] from the cumulative table by inclusion-
    // exclusion, then accumulate the exact moment sums.
    mpz_class sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (int k = 0; k <= n; k++) {
        for (int j = 0; j <= n; j++) {
            const std::uint64_t fkj = table.at(k, j) - table.at(k - 1, j) - table.at(k, j - 1) +
                                      table.at(k - 1, j - 1);
            if (!fkj) continue;
            mpz_class w(static_cast<unsigned long>(fkj));
            sx += w * k;
            sy += w * j;
            sxy += w * k * j;
            sxx += w * k * k;
            syy += w * j * j;
        }
    }

    CovCor r;
    r.covariance = mpq_class(total * sxy - sx * sy, total * total);
    r.covariance.canonicalize();
    const mpq_class var_x(total * sxx - sx * sx, total * total);
    const mpq_class var_y(total * syy - sy * sy, total * total);
    if (var_x == 0 || var_y == 0) {
        r.degenerate = true;
        r.correlation = 0;
        return r;
    }
    if (var_x != var_y)
        throw ValidationError("joint law not symmetric: Var(cro) != Var(nes)");
    r.correlation = r.covariance / var_x;
    r.correlation.canonicalize();
    return r;
}

std::string rational_to_decimal(const mpq_class& q, int significant_digits) {
    mpfr_t x;
    mpfr_init2(x, 128 + 4 * significant_digits);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", significant_digits, x);
    std::string out(s);
    mpfr_free_str(s);
    mpfr_clear(x);
    return out;
}

Matching sample_matching(int n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw ValidationError("sample_matching requires n >= 1");
    Rng rng(seed, stream);
    std::vector<int> free_points(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < 2 * n; i++) free_points[i] = i + 1;

    Matching m;
    m.n = n;
    m.arcs.reserve(n);
    while (!free_points.empty()) {
        const int opener = free_points.front();
        const std::size_t pick = 1 + rng.next_below(free_points.size() - 1);
        const int closer = free_points[pick];
        m.arcs.emplace_back(opener, closer);
        free_points.erase(free_points.begin() + pick);
        free_points.erase(free_points.begin());
    }
    return m;
}

double scale_stat(int stat, int n) {
    const double two_n = 2.0 * n;
    return (stat - std::sqrt(two_n)) / (0.5 * std::pow(two_n, 1.0 / 6.0));
}

namespace {

McCovariance jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    const int m = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < m; i++) { sx += x[i]; sy += y[i]; sxy += x[i] * y[i]; }
    McCovariance r;
    r.reps = m;
    r.estimate = (sxy - sx * sy / m) / (m - 1);
    if (m < 3) {  // leave-one-out needs m-1 >= 2
        r.stderr_jackknife = 0.0;
        return r;
    }
    std::vector<double> theta(m);
    double mean_theta = 0;
    for (int i = 0; i < m; i++) {
        const double sxi = sx - x[i], syi = sy - y[i], sxyi = sxy - x[i] * y[i];
        theta[i] = (sxyi - sxi * syi / (m - 1)) / (m - 2);
        mean_theta += theta[i];
    }
    mean_theta /= m;
    double ss = 0;
    for (int i = 0; i < m; i++) ss += (theta[i] - mean_theta) * (theta[i] - mean_theta);
    r.stderr_jackknife = std::sqrt(ss * (m - 1) / m);
    return r;
}

void fill_scaled_samples(int n, int reps, std::uint64_t seed, bool parallel,
                         std::vector<double>& x, std::vector<double>& y) {
    x.resize(reps);
    y.resize(reps);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (int r = 0; r < reps; r++) {
        Matching m = sample_matching(n, seed, static_cast<std::uint64_t>(r) + 1);
        x[r] = scale_stat(max_crossing(m), n);
        y[r] = scale_stat(max_nesting(m), n);
    }
}

}  // namespace

McCovariance mc_scaled_covariance(int n, int reps, std::uint64_t seed) {
    if (reps < 2) throw ValidationError("mc_scaled_covariance requires reps >= 2");
    std::vector<double> x, y;
    fill_scaled_samples(n, reps, seed, true, x, y);
    return jackknife_covariance(x, y);
}

McCovariance mc_scaled_covariance_serial(int n, int reps, std::uint64_t seed) {
    if (reps < 2) throw ValidationError("mc_scaled_covariance requires reps >= 2");
    std::vector<double> x, y;
    fill_scaled_samples(n, reps, seed, false, x, y);
    return jackknife_covariance(x, y);
}

bool monotonicity_check(const StatTable& at_n, const StatTable& at_n_plus_1) {
    if (at_n_plus_1.n != at_n.n + 1) throw ValidationError("tables must be consecutive in n");
    const std::uint64_t factor = 2 * static_cast<std::uint64_t>(at_n.n) + 1;
    for (int k = 0; k <= at_n_plus_1.n; k++)
        for (int j = 0; j <= at_n_plus_1.n; j++)
            if (at_n_plus_1.at(k, j) > factor * at_n.at(k, j)) return false;
    return true;
}

bool monotonicity_check(int n) {
    if (n < 1 || n + 1 > kMaxEnumerationN)
        throw CapacityError("monotonicity_check requires 1 <= n <= " +
                            std::to_string(kMaxEnumerationN - 1));
    return monotonicity_check(joint_count_table(n), joint_count_table(n + 1));
}

std::vector<SandwichCell> depoissonization_sandwich(const std::vector<StatTable>& tables,
                                                    int n, double s) {
    const int n_max = static_cast<int>(tables.size()) - 1;
    if (n < 2 || n > n_max) throw ValidationError("sandwich requires 2 <= n <= table range");
    for (int i = 0; i <= n_max; i++)
        if (tables[i].n != i) throw ValidationError("tables must cover n = 0..n_max in order");

    const double mu = n + 2.0 * std::sqrt(s * n * std::log(static_cast<double>(n)));
    const double nu = n - 2.0 * std::sqrt(s * n * std::log(static_cast<double>(n)));
    const double slack = std::pow(static_cast<double>(n), -s);

    // phi_lo/phi_hi at Poisson parameter lambda, given a_i only for i <= n_max.
    auto phi_bracket = [&](double lambda, int k, int j) {
        double lo = 0.0, weight_seen = 0.0, a_last = 1.0;
        double p = std::exp(-lambda);  // P{N = 0}
        for (int i = 0; i <= n_max; i++) {
            const double a_i =
                static_cast<double>(tables[i].at(k, j)) / static_cast<double>(odd_double_factorial(i));
            lo += p * a_i;
            weight_seen += p;
            a_last = a_i;
            p *= lambda / (i + 1);
        }
        const double hi = lo + a_last * std::max(0.0, 1.0 - weight_seen);
        return std::pair<double, double>(lo, hi);
    };

    std::vector<SandwichCell> cells;
    for (int k = 1; k <= n; k++) {
        for (int j = 1; j <= n; j++) {
            SandwichCell c;
            c.k = k;
            c.j = j;
            const double a_n =
                static_cast<double>(tables[n].at(k, j)) / static_cast<double>(odd_double_factorial(n));

            auto [mu_lo, mu_hi] = phi_bracket(mu, k, j);
            c.lower_verified = (mu_hi - slack <= a_n);
            c.lower_refuted = (mu_lo - slack > a_n);

            if (nu <= 0.0) {
                c.upper_verified = true;  // phi(0) = a_0 = 1 bounds everything
            } else {
                auto [nu_lo, nu_hi] = phi_bracket(nu, k, j);
                c.upper_verified = (a_n <= nu_lo + slack);
                c.upper_refuted = (a_n > nu_hi + slack);
            }
            cells.push_back(c);
        }
    }
    return cells;
}

std::string table1_csv(int n_max) {
    std::ostringstream out;
    out << "2n,count,covariance,correlation\n";
    for (int n = 2; n <= n_max; n++) {
        const CovCor cc = exact_cov_cor(n);
        out << 2 * n << "," << odd_double_factorial(n) << ","
            << rational_to_decimal(cc.covariance, 10) << ","
            << rational_to_decimal(cc.correlation, 10) << "\n";
    }
    return out.str();
}

}  // namespace matchstat
