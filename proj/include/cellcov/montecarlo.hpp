#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cellcov/numerics.hpp"
#include "cellcov/propagation.hpp"

namespace cellcov {

struct SimConfig {
    double region_radius = 10000.0;  // meters
    long n_snapshots = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
};

void validate(const SimConfig& sim);

struct InterfererSample {
    double xi;        // inverse mean path gain (h L(y) P)^{-1}
    double theta;     // beam offset of the mobile at this BS, radians
    bool co_channel;  // shares the serving BS's frequency slice
};

// One spatial realization seen from a mobile at the origin: base stations,
// shadowing, frequency marks, and beam offsets are drawn once and held fixed;
// only fast fading changes between slots.
struct Snapshot {
    double serving_xi = 0.0;
    int serving_mark = 1;
    std::size_t serving_index = 0;              // into positions
    std::vector<InterfererSample> interferers;  // draw order, serving removed
    long bs_count = 0;
    long resample_count = 0;  // empty-region realizations rejected
    std::vector<std::array<double, 2>> positions;  // all BSs, draw order
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
    std::uint64_t successes = 0;
};

// Draws one snapshot: Poisson(lambda_b pi R^2) BSs uniform on the disk,
// i.i.d. shadowing per BS, marks uniform on 1..k, beam offsets uniform on
// (-pi, pi). The mobile attaches to the minimum xi, ties to the lowest draw
// index. An empty realization is redrawn from the next substream and counted.
Snapshot sample_snapshot(const PropagationEnvironment& env, const SimConfig& sim,
                         RngStream stream);

// SINR of one slot: r0 xi0^{-1} / (N + sum co-channel a(theta_i) r_i xi_i^{-1})
// with fresh Exp(mu) fading per call, consumed in list order (serving first).
double sinr_slot(const PropagationEnvironment& env, const Snapshot& snap,
                 RngStream& fading);

// P(one slot's SINR < threshold). Equals estimate_handover with one slot,
// indicator for indicator.
Estimate estimate_outage(const PropagationEnvironment& env, const SimConfig& sim,
                         double threshold);

// P(slots consecutive SINRs all < threshold), geometry held fixed per
// snapshot. Snapshot i derives its own substreams from (seed, i), so results
// are identical for any worker count.
Estimate estimate_handover(const PropagationEnvironment& env, const SimConfig& sim,
                           double threshold, int slots);

}  // namespace cellcov
