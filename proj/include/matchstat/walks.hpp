#pragma once

#include <cstdint>
#include <vector>

#include "matchstat/errors.hpp"

namespace matchstat {

// Monte Carlo for N continuous-time simple random walks X_i = Z_i - i,
// i = 0..N-1 (each Z_i jumps +-1 at rate 1 each way), conditioned on
//   return:   X_i(t) = -i for every i,
//   ordering: X_0(tau) > X_1(tau) > ... > X_{N-1}(tau) >= -N+1 on [0,t].
// Paths are piecewise constant, so the constraints are checked at jump
// times only.  Replica r draws from stream r+1 of the seed, making results
// independent of the thread count.

struct McEstimate {
    double estimate = 0;
    double stderr_value = 0;
    long reps = 0;
    long accepted = 0;
};

// P(return and ordering) by rejection counting.
McEstimate simulate_event_prob(double t, int N, long reps, std::uint64_t seed);
McEstimate simulate_event_prob_serial(double t, int N, long reps, std::uint64_t seed);

// Joint law of (K, J) among accepted paths, where K = max over [0,t] of
// X_0 (K >= 0 since X_0(0) = 0) and J = 1 + the largest index of any walker
// that jumped (0 when nothing moved): exactly the height and depth whose law
// matches the crossing/nesting distribution.
struct HeightDepthLaw {
    double t = 0;
    int N = 0;
    long reps = 0;
    long accepted = 0;
    int k_max = 0;                      // largest K observed
    std::vector<std::uint64_t> counts;  // (k_max+1) x (N+1), row = K, col = J

    std::uint64_t count(int k, int j) const;
    double cdf(int k, int j) const;           // empirical P{K<=k, J<=j}
    double cdf_stderr(int k, int j) const;    // binomial sqrt(p(1-p)/accepted)
    std::string to_csv() const;
};

HeightDepthLaw conditional_height_depth(double t, int N, long reps, std::uint64_t seed);

}  // namespace matchstat
