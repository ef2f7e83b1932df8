#include "matchstat/walks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "matchstat/rng.hpp"

namespace matchstat {

namespace {

constexpr int kMaxWalkers = 16;

struct ReplicaOutcome {
    bool accepted = false;
    std::int8_t height = 0;  // K
    std::int8_t depth = 0;   // J
};

// One conditioned-path attempt.  Event-driven: each walker holds its next
// jump time (rate-2 exponential clocks, fair +-1 marks); the earliest jump
// moves, and the ordering/floor constraints are checked right after.
ReplicaOutcome run_replica(double t, int N, Rng& rng) {
    double next_time[kMaxWalkers];
    int pos[kMaxWalkers];
    bool moved[kMaxWalkers];
    for (int i = 0; i < N; i++) {
        next_time[i] = rng.next_exponential(2.0);
        pos[i] = -i;
        moved[i] = false;
    }

    ReplicaOutcome out;
    int height = 0;
    for (;;) {
        int who = 0;
        for (int i = 1; i < N; i++)
            if (next_time[i] < next_time[who]) who = i;
        if (next_time[who] > t) break;

        const int step = (rng.next_u64() & 1) ? 1 : -1;
        pos[who] += step;
        moved[who] = true;
        next_time[who] += rng.next_exponential(2.0);

        if (who > 0 && pos[who - 1] <= pos[who]) return out;
        if (who + 1 < N && pos[who] <= pos[who + 1]) return out;
        if (pos[N - 1] < -N + 1) return out;
        if (who == 0) height = std::max(height, pos[0]);
    }
    for (int i = 0; i < N; i++)
        if (pos[i] != -i) return out;

    out.accepted = true;
    out.height = static_cast<std::int8_t>(height);
    int depth = 0;
    for (int i = 0; i < N; i++)
        if (moved[i]) depth = i + 1;
    out.depth = static_cast<std::int8_t>(depth);
    return out;
}

void validate_inputs(double t, int N, long reps) {
    if (!(t >= 0)) throw ValidationError("walks need t >= 0");
    if (N < 1 || N > kMaxWalkers)
        throw ValidationError("walks support 1 <= N <= " + std::to_string(kMaxWalkers));
    if (reps < 1) throw ValidationError("walks need reps >= 1");
}

template <typename Tally>
void run_replicas(double t, int N, long reps, std::uint64_t seed, bool parallel, Tally&& tally) {
    // Chunks are tallied in index order after the parallel sweep so the
    // aggregate is schedule-independent.
    constexpr long kChunk = 8192;
    const long chunks = (reps + kChunk - 1) / kChunk;
    std::vector<std::vector<ReplicaOutcome>> per_chunk(chunks);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long c = 0; c < chunks; c++) {
        const long lo = c * kChunk, hi = std::min(reps, lo + kChunk);
        auto& buf = per_chunk[c];
        buf.reserve(hi - lo);
        for (long r = lo; r < hi; r++) {
            Rng rng(seed, static_cast<std::uint64_t>(r) + 1);
            buf.push_back(run_replica(t, N, rng));
        }
    }
    for (const auto& buf : per_chunk)
        for (const ReplicaOutcome& o : buf) tally(o);
}

McEstimate estimate_event_prob(double t, int N, long reps, std::uint64_t seed, bool parallel) {
    validate_inputs(t, N, reps);
    long accepted = 0;
    run_replicas(t, N, reps, seed, parallel, [&](const ReplicaOutcome& o) {
        if (o.accepted) accepted++;
    });
    McEstimate e;
    e.reps = reps;
    e.accepted = accepted;
    e.estimate = static_cast<double>(accepted) / static_cast<double>(reps);
    e.stderr_value = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(reps));
    return e;
}

}  // namespace

McEstimate simulate_event_prob(double t, int N, long reps, std::uint64_t seed) {
    return estimate_event_prob(t, N, reps, seed, true);
}

McEstimate simulate_event_prob_serial(double t, int N, long reps, std::uint64_t seed) {
    return estimate_event_prob(t, N, reps, seed, false);
}

HeightDepthLaw conditional_height_depth(double t, int N, long reps, std::uint64_t seed) {
    validate_inputs(t, N, reps);
    HeightDepthLaw law;
    law.t = t;
    law.N = N;
    law.reps = reps;

    std::map<std::pair<int, int>, std::uint64_t> tally;
    run_replicas(t, N, reps, seed, true, [&](const ReplicaOutcome& o) {
        if (!o.accepted) return;
        law.accepted++;
        law.k_max = std::max(law.k_max, static_cast<int>(o.height));
        tally[{o.height, o.depth}]++;
    });
    if (law.accepted < 100)
        throw InsufficientAcceptanceError("only " + std::to_string(law.accepted) +
                                          " accepted replicas; need >= 100");

    law.counts.assign(static_cast<std::size_t>(law.k_max + 1) * (N + 1), 0);
    for (const auto& [kj, c] : tally)
        law.counts[static_cast<std::size_t>(kj.first) * (N + 1) + kj.second] = c;
    return law;
}

std::uint64_t HeightDepthLaw::count(int k, int j) const {
    if (k < 0 || k > k_max || j < 0 || j > N) return 0;
    return counts[static_cast<std::size_t>(k) * (N + 1) + j];
}

double HeightDepthLaw::cdf(int k, int j) const {
    std::uint64_t acc = 0;
    for (int a = 0; a <= std::min(k, k_max); a++)
        for (int b = 0; b <= std::min(j, N); b++) acc += count(a, b);
    return static_cast<double>(acc) / static_cast<double>(accepted);
}

double HeightDepthLaw::cdf_stderr(int k, int j) const {
    const double p = cdf(k, j);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(accepted));
}

std::string HeightDepthLaw::to_csv() const {
    std::ostringstream out;
    out << "K,J,count\n";
    for (int k = 0; k <= k_max; k++)
        for (int j = 0; j <= N; j++)
            if (count(k, j)) out << k << "," << j << "," << count(k, j) << "\n";
    return out.str();
}

}  // namespace matchstat
