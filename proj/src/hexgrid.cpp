// hexgrid.cpp - hexagonal-lattice baseline: planned frequency reuse on a
// triangular BS lattice, evaluated under the same propagation scenario and
// slot machinery as the Poisson engine.
#include "cellcov/hexgrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <thread>
#include <utility>

namespace cellcov {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt3 = 1.7320508075688772;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

int positive_mod(long value, long modulus) {
    return static_cast<int>(((value % modulus) + modulus) % modulus);
}

int hex_distance(int q, int r) {
    return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2;
}

std::uint64_t fading_substream(std::uint64_t snapshot) { return snapshot << 16; }
std::uint64_t geometry_substream(std::uint64_t snapshot) {
    return (snapshot << 16) | 1u;
}

}  // namespace

HexLayout build_layout(double lambda_b, int rings, int shift_i, int shift_j) {
    require(std::isfinite(lambda_b) && lambda_b > 0.0,
            "build_layout: lambda_b must be > 0");
    require(rings >= 1, "build_layout: rings must be >= 1");
    require(shift_i >= 0 && shift_j >= 0 && shift_i + shift_j > 0,
            "build_layout: shift (i, j) must be nonnegative, not both zero");

    HexLayout layout;
    layout.rings = rings;
    layout.shift_i = shift_i;
    layout.shift_j = shift_j;
    layout.reuse_k = shift_i * shift_i + shift_i * shift_j + shift_j * shift_j;
    // Hexagon area (3 sqrt(3)/2) R_c^2 = 1/lambda_b.
    layout.cell_radius = std::sqrt(2.0 / (3.0 * kSqrt3 * lambda_b));
    const double spacing = kSqrt3 * layout.cell_radius;

    std::vector<std::array<int, 2>> coords;
    coords.reserve(static_cast<std::size_t>(1 + 3 * rings * (rings + 1)));
    for (int q = -rings; q <= rings; ++q)
        for (int r = -rings; r <= rings; ++r)
            if (hex_distance(q, r) <= rings) coords.push_back({q, r});
    // Ring-major order: growing the layout appends sites, so draw sequences
    // for the inner sites are unchanged (common random numbers across rings).
    std::sort(coords.begin(), coords.end(),
              [](const std::array<int, 2>& a, const std::array<int, 2>& b) {
                  const int da = hex_distance(a[0], a[1]);
                  const int db = hex_distance(b[0], b[1]);
                  if (da != db) return da < db;
                  return a < b;
              });

    // Coset label of (q, r) in the co-channel sub-lattice: the adjugate of
    // the basis [[i, -j], [j, i+j]] maps the sub-lattice onto k Z^2, so the
    // label is constant exactly on cosets.
    const long k = layout.reuse_k;
    std::map<std::pair<int, int>, int> group_of_label;
    layout.sites.reserve(coords.size());
    for (const auto& qr : coords) {
        const long q = qr[0];
        const long r = qr[1];
        const std::pair<int, int> label = {
            positive_mod((shift_i + shift_j) * q + shift_j * r, k),
            positive_mod(shift_i * r - shift_j * q, k)};
        const auto [it, inserted] = group_of_label.try_emplace(
            label, static_cast<int>(group_of_label.size()));
        HexSite site;
        site.position = {spacing * (q + 0.5 * r), spacing * (kSqrt3 / 2.0) * r};
        site.group = it->second;
        site.ring = hex_distance(qr[0], qr[1]);
        layout.sites.push_back(site);
    }

    const auto center_group = std::count_if(
        layout.sites.begin(), layout.sites.end(),
        [](const HexSite& site) { return site.group == 0; });
    require(center_group >= 2,
            "build_layout: rings too small to contain a co-channel cell");
    return layout;
}

bool point_in_hexagon(double corner_radius, double x, double y) {
    const double half_width = 0.5 * kSqrt3 * corner_radius;
    return std::abs(x) <= half_width &&
           std::abs(0.5 * x + (kSqrt3 / 2.0) * y) <= half_width &&
           std::abs(0.5 * x - (kSqrt3 / 2.0) * y) <= half_width;
}

std::array<double, 2> sample_point_in_hexagon(double corner_radius,
                                              RngStream& stream) {
    require(std::isfinite(corner_radius) && corner_radius > 0.0,
            "sample_point_in_hexagon: corner_radius must be > 0");
    const double half_width = 0.5 * kSqrt3 * corner_radius;
    for (;;) {
        const double x = (2.0 * stream.next_uniform() - 1.0) * half_width;
        const double y = (2.0 * stream.next_uniform() - 1.0) * corner_radius;
        if (point_in_hexagon(corner_radius, x, y)) return {x, y};
    }
}

Snapshot sample_hex_snapshot(const HexLayout& layout,
                             const PropagationEnvironment& env,
                             RngStream stream) {
    validate(env);
    require(!layout.sites.empty(), "sample_hex_snapshot: layout has no sites");
    const auto ms = sample_point_in_hexagon(layout.cell_radius, stream);

    const std::size_t n = layout.sites.size();
    std::vector<double> xi(n);
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pos = layout.sites[i].position;
        const double shadow = sample_shadowing(env.shadowing, stream);
        theta[i] = (2.0 * stream.next_uniform() - 1.0) * kPi;
        const double dist = std::hypot(pos[0] - ms[0], pos[1] - ms[1]);
        xi[i] = 1.0 / (shadow * path_loss(env.pathloss, dist) * env.p_tx);
    }

    Snapshot snap;
    snap.bs_count = static_cast<long>(n);
    const auto best = std::min_element(xi.begin(), xi.end());
    snap.serving_index = static_cast<std::size_t>(best - xi.begin());
    snap.serving_xi = *best;
    const int serving_group = layout.sites[snap.serving_index].group;
    snap.serving_mark = serving_group + 1;
    snap.interferers.reserve(n - 1);
    snap.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        snap.positions.push_back(layout.sites[i].position);
        if (i == snap.serving_index) continue;
        snap.interferers.push_back(
            {xi[i], theta[i], layout.sites[i].group == serving_group});
    }
    return snap;
}

namespace {

std::uint64_t tally_hex_range(const HexLayout& layout,
                              const PropagationEnvironment& env,
                              const SimConfig& sim, double threshold, int slots,
                              long begin, long end) {
    std::uint64_t hits = 0;
    for (long i = begin; i < end; ++i) {
        const auto index = static_cast<std::uint64_t>(i);
        const Snapshot snap = sample_hex_snapshot(
            layout, env, RngStream(sim.seed, geometry_substream(index)));
        RngStream fading(sim.seed, fading_substream(index));
        bool all_below = true;
        for (int l = 0; l < slots && all_below; ++l)
            all_below = sinr_slot(env, snap, fading) < threshold;
        if (all_below) ++hits;
    }
    return hits;
}

Estimate run_hex_bernoulli(const HexLayout& layout,
                           const PropagationEnvironment& env,
                           const SimConfig& sim, double threshold, int slots) {
    validate(env);
    validate(sim);
    require(std::isfinite(threshold) && threshold > 0.0,
            "estimate: threshold must be > 0");
    require(slots >= 1, "estimate: slots must be >= 1");

    const long n = sim.n_snapshots;
    const long workers = std::clamp<long>(sim.workers, 1, n);
    std::vector<std::uint64_t> parts(static_cast<std::size_t>(workers), 0);
    if (workers == 1) {
        parts[0] = tally_hex_range(layout, env, sim, threshold, slots, 0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const long chunk = (n + workers - 1) / workers;
        for (long w = 0; w < workers; ++w) {
            const long begin = w * chunk;
            const long end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(
                [&layout, &env, &sim, threshold, slots, &parts, w, begin, end] {
                    parts[static_cast<std::size_t>(w)] = tally_hex_range(
                        layout, env, sim, threshold, slots, begin, end);
                });
        }
        for (auto& worker : pool) worker.join();
    }

    std::uint64_t hits = 0;
    for (const auto part : parts) hits += part;
    Estimate est;
    est.n = n;
    est.successes = hits;
    est.mean = static_cast<double>(hits) / static_cast<double>(n);
    est.std_error =
        std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    return est;
}

}  // namespace

Estimate estimate_hex_outage(const HexLayout& layout,
                             const PropagationEnvironment& env,
                             const SimConfig& sim, double threshold) {
    return run_hex_bernoulli(layout, env, sim, threshold, 1);
}

Estimate estimate_hex_handover(const HexLayout& layout,
                               const PropagationEnvironment& env,
                               const SimConfig& sim, double threshold,
                               int slots) {
    return run_hex_bernoulli(layout, env, sim, threshold, slots);
}

}  // namespace cellcov
