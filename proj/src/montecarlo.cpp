// montecarlo.cpp - snapshot simulation of the coverage scenario: static
// Poisson base stations, shadowing, marks, and beam offsets drawn once per
// snapshot, Rayleigh fading redrawn per slot.
#include "cellcov/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace cellcov {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

// Substream layout: snapshot i owns stream indices [i 2^16, (i+1) 2^16);
// index 0 is slot fading, 1 + a is geometry attempt a.
std::uint64_t fading_substream(std::uint64_t snapshot) { return snapshot << 16; }
std::uint64_t geometry_substream(std::uint64_t snapshot) {
    return (snapshot << 16) | 1u;
}

// Arrival construction: N = #{n : Exp(1) partial sum S_n <= intensity}.
long poisson_count(double intensity, RngStream& stream) {
    long count = 0;
    double arrival = stream.next_exponential(1.0);
    while (arrival <= intensity) {
        ++count;
        arrival += stream.next_exponential(1.0);
    }
    return count;
}

}  // namespace

void validate(const SimConfig& sim) {
    require(std::isfinite(sim.region_radius) && sim.region_radius > 0.0,
            "SimConfig: region_radius must be > 0");
    require(sim.n_snapshots >= 1, "SimConfig: n_snapshots must be >= 1");
    require(sim.workers >= 1, "SimConfig: workers must be >= 1");
}

Snapshot sample_snapshot(const PropagationEnvironment& env, const SimConfig& sim,
                         RngStream stream) {
    validate(env);
    validate(sim);
    const double mean_count =
        env.lambda_b * kPi * sim.region_radius * sim.region_radius;

    Snapshot snap;
    long count = poisson_count(mean_count, stream);
    while (count == 0) {
        ++snap.resample_count;
        stream = RngStream(stream.seed(), stream.stream_index() + 1);
        count = poisson_count(mean_count, stream);
    }
    snap.bs_count = count;

    const auto n = static_cast<std::size_t>(count);
    snap.positions.resize(n);
    std::vector<double> xi(n);
    std::vector<double> theta(n);
    std::vector<int> mark(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = sim.region_radius * std::sqrt(stream.next_uniform());
        const double angle = 2.0 * kPi * stream.next_uniform();
        snap.positions[i] = {radius * std::cos(angle), radius * std::sin(angle)};
        const double shadow = sample_shadowing(env.shadowing, stream);
        if (env.reuse_k > 1)
            mark[i] = 1 + static_cast<int>(stream.next_u64() %
                                           static_cast<std::uint64_t>(env.reuse_k));
        theta[i] = (2.0 * stream.next_uniform() - 1.0) * kPi;
        xi[i] = 1.0 / (shadow * path_loss(env.pathloss, radius) * env.p_tx);
    }

    const auto best = std::min_element(xi.begin(), xi.end());
    snap.serving_index = static_cast<std::size_t>(best - xi.begin());
    snap.serving_xi = *best;
    snap.serving_mark = mark[snap.serving_index];
    snap.interferers.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == snap.serving_index) continue;
        snap.interferers.push_back({xi[i], theta[i], mark[i] == snap.serving_mark});
    }
    return snap;
}

double sinr_slot(const PropagationEnvironment& env, const Snapshot& snap,
                 RngStream& fading) {
    require(snap.bs_count >= 1 && snap.serving_xi > 0.0,
            "sinr_slot: snapshot has no serving BS");
    const double signal = fading.next_exponential(env.mu) / snap.serving_xi;
    double denom = env.noise;
    for (const auto& bs : snap.interferers) {
        if (!bs.co_channel) continue;
        denom += gain_a(env.beam, bs.theta) * fading.next_exponential(env.mu) / bs.xi;
    }
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return signal / denom;
}

namespace {

struct Tally {
    std::uint64_t hits = 0;
};

// One snapshot's indicator: all `slots` SINR draws below the threshold.
// Depends only on (seed, snapshot index), never on scheduling.
Tally tally_range(const PropagationEnvironment& env, const SimConfig& sim,
                  double threshold, int slots, long begin, long end) {
    Tally tally;
    for (long i = begin; i < end; ++i) {
        const auto index = static_cast<std::uint64_t>(i);
        const Snapshot snap = sample_snapshot(
            env, sim, RngStream(sim.seed, geometry_substream(index)));
        RngStream fading(sim.seed, fading_substream(index));
        bool all_below = true;
        for (int l = 0; l < slots && all_below; ++l)
            all_below = sinr_slot(env, snap, fading) < threshold;
        if (all_below) ++tally.hits;
    }
    return tally;
}

Estimate run_bernoulli(const PropagationEnvironment& env, const SimConfig& sim,
                       double threshold, int slots) {
    validate(env);
    validate(sim);
    require(std::isfinite(threshold) && threshold > 0.0,
            "estimate: threshold must be > 0");
    require(slots >= 1, "estimate: slots must be >= 1");

    const long n = sim.n_snapshots;
    const long workers = std::clamp<long>(sim.workers, 1, n);
    std::vector<Tally> parts(static_cast<std::size_t>(workers));
    if (workers == 1) {
        parts[0] = tally_range(env, sim, threshold, slots, 0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const long chunk = (n + workers - 1) / workers;
        for (long w = 0; w < workers; ++w) {
            const long begin = w * chunk;
            const long end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&env, &sim, threshold, slots, &parts, w, begin, end] {
                parts[static_cast<std::size_t>(w)] =
                    tally_range(env, sim, threshold, slots, begin, end);
            });
        }
        for (auto& worker : pool) worker.join();
    }

    std::uint64_t hits = 0;
    for (const auto& part : parts) hits += part.hits;
    Estimate est;
    est.n = n;
    est.successes = hits;
    est.mean = static_cast<double>(hits) / static_cast<double>(n);
    est.std_error =
        std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    return est;
}

}  // namespace

Estimate estimate_outage(const PropagationEnvironment& env, const SimConfig& sim,
                         double threshold) {
    return run_bernoulli(env, sim, threshold, 1);
}

Estimate estimate_handover(const PropagationEnvironment& env, const SimConfig& sim,
                           double threshold, int slots) {
    return run_bernoulli(env, sim, threshold, slots);
}

}  // namespace cellcov
