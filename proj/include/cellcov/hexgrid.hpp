#pragma once

#include <array>
#include <vector>

#include "cellcov/montecarlo.hpp"
#include "cellcov/numerics.hpp"
#include "cellcov/propagation.hpp"

namespace cellcov {

struct HexSite {
    std::array<double, 2> position;
    int group;  // frequency group, 0..reuse_k-1; the center cell is group 0
    int ring;   // hex distance from the center cell
};

// Triangular lattice of BSs whose cells are pointy-top hexagons of the given
// corner radius, with planned frequency reuse: co-channel cells form the
// sub-lattice generated by the axial shift (i, j), so reuse_k = i^2 + ij + j^2.
struct HexLayout {
    double cell_radius = 0.0;  // corner radius, meters
    int rings = 0;
    int shift_i = 1;
    int shift_j = 0;
    int reuse_k = 1;
    std::vector<HexSite> sites;  // ordered by ring, then axial (q, r)
};

// Lattice matched to a Poisson density: hexagon area (3 sqrt(3)/2) R_c^2 =
// 1/lambda_b. Throws when no co-channel cell of the center falls within
// `rings`.
HexLayout build_layout(double lambda_b, int rings, int shift_i, int shift_j);

bool point_in_hexagon(double corner_radius, double x, double y);

// Uniform draw over the pointy-top hexagon, by rejection from its bounding
// box (acceptance 3/4).
std::array<double, 2> sample_point_in_hexagon(double corner_radius,
                                              RngStream& stream);

// One lattice snapshot: MS uniform in the center cell, i.i.d. shadowing per
// BS, best-server attachment, interferers flagged co-channel when they share
// the serving group. Slot machinery is shared with the Poisson engine.
Snapshot sample_hex_snapshot(const HexLayout& layout,
                             const PropagationEnvironment& env,
                             RngStream stream);

// Estimators mirroring the Poisson engine: same substream layout per
// snapshot index, same worker-count-independent reduction. env.reuse_k is
// ignored; the layout's planned reuse governs interference.
Estimate estimate_hex_outage(const HexLayout& layout,
                             const PropagationEnvironment& env,
                             const SimConfig& sim, double threshold);

Estimate estimate_hex_handover(const HexLayout& layout,
                               const PropagationEnvironment& env,
                               const SimConfig& sim, double threshold,
                               int slots);

}  // namespace cellcov
