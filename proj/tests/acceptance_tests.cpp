// Release acceptance suite. Each test case covers one numbered criterion and
// prints exactly one "criterion N: PASS|FAIL - <summary>" line, so the result
// of every criterion is visible in the test log even when doctest aborts
// nothing (no REQUIREs here: a thrown assertion would skip the verdict line).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cellcov/analytic.hpp"
#include "cellcov/experiment.hpp"
#include "cellcov/montecarlo.hpp"
#include "cellcov/propagation.hpp"
#include "doctest.h"

using namespace cellcov;

namespace {

constexpr double kPi = 3.14159265358979323846;
// 1 / (pi 500^2): one BS per 500 m-radius disk on average.
constexpr double kDensity = 1.2732395447351628e-6;

struct Criterion {
    int number;
    std::string summary;
    bool ok = true;

    void require(bool passed) { ok = ok && passed; }
    ~Criterion() {
        std::printf("criterion %d: %s - %s\n", number, ok ? "PASS" : "FAIL",
                    summary.empty() ? "(no summary recorded)" : summary.c_str());
        std::fflush(stdout);
    }
};

std::string note(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

PropagationEnvironment base_env(double gamma, int reuse_k) {
    PropagationEnvironment env;
    env.lambda_b = kDensity;
    env.pathloss = PathLossModel::exponent(0.01, gamma);
    env.reuse_k = reuse_k;
    return env;
}

// One cell of the cross-validation grid: threshold sweep over -10/0/+10 dB,
// interference-limited, Omni, 1e4 snapshots on a 10 km disk.
ExperimentConfig grid_config(double gamma, int reuse_k) {
    ExperimentConfig config;
    config.density_per_m2 = kDensity;
    config.pathloss_gamma = gamma;
    config.reuse_k = reuse_k;
    config.slots = 1;
    config.sweep_name = "threshold_db";
    config.sweep_start = -10.0;
    config.sweep_stop = 10.0;
    config.sweep_step = 10.0;
    config.region_radius_m = 10000.0;
    config.snapshots = 10000;
    config.seed = 2026;
    return config;
}

// The reuse-7 coverage-figure scenario: lognormal shadowing, threshold sweep
// wide enough to bracket the 50% outage level of both engines.
ExperimentConfig figure_config(double gamma) {
    ExperimentConfig config;
    config.density_per_m2 = kDensity;
    config.pathloss_gamma = gamma;
    config.shadowing_model = "lognormal";
    config.shadowing_sigma_db = 8.0;
    config.reuse_k = 7;
    config.slots = 1;
    config.sweep_name = "threshold_db";
    config.sweep_start = -10.0;
    config.sweep_stop = 26.0;
    config.sweep_step = 2.0;
    config.region_radius_m = 5000.0;
    config.snapshots = 4000;
    config.seed = 606;
    config.hex_enabled = true;
    config.hex_rings = 5;
    config.hex_i = 2;
    config.hex_j = 1;
    return config;
}

}  // namespace

#define ACCEPT(crit, ...)                                         \
    do {                                                          \
        const bool accept_ok = static_cast<bool>(__VA_ARGS__);    \
        CHECK_MESSAGE(accept_ok, #__VA_ARGS__);                   \
        (crit).require(accept_ok);                                \
    } while (0)

TEST_CASE("criterion 1: interference-limited gamma-4 closed form matches the full quadrature") {
    Criterion crit{1};
    try {
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (double threshold : {0.1, 1.0, 10.0, 100.0}) {
            const double root = std::sqrt(threshold);
            const double m = 1.0 + root * (kPi / 2.0 - std::atan(1.0 / root));
            const double closed = 1.0 - 1.0 / m;
            const double full =
                outage_probability_quadrature({base_env(4.0, 1), threshold, 1});
            worst = std::max(worst, std::abs(closed - full));
        }
        const double elapsed = seconds_since(start);
        ACCEPT(crit, worst <= 1e-6);
        ACCEPT(crit, elapsed < 1.0);
        crit.summary = note(
            "max |closed form - quadrature| %.2e over T in {0.1,1,10,100}, %.2f s",
            worst, elapsed);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 2: Monte Carlo outage matches analytic across the threshold/gamma/reuse grid") {
    Criterion crit{2};
    try {
        const auto start = std::chrono::steady_clock::now();
        ModelSelection models;
        models.hexagonal_mc = false;

        int points = 0;
        double worst_margin = -1e300;
        std::string worst_point = "none";
        for (double gamma : {3.0, 4.0}) {
            for (int reuse_k : {1, 3, 7}) {
                const auto rows = run_sweep(grid_config(gamma, reuse_k), models);
                ACCEPT(crit, rows.size() == 6);
                for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
                    const ResultRow& analytic = rows[i];
                    const ResultRow& mc = rows[i + 1];
                    const bool usable =
                        analytic.model == "poisson_analytic" &&
                        mc.model == "poisson_mc" && analytic.error.empty() &&
                        mc.error.empty() && analytic.p_outage.has_value() &&
                        mc.p_outage.has_value() && mc.p_outage_stderr.has_value();
                    ACCEPT(crit, usable);
                    if (!usable) continue;

                    const double diff = *mc.p_outage - *analytic.p_outage;
                    const double bound = std::max(0.01, 3.0 * *mc.p_outage_stderr);
                    ++points;
                    if (std::abs(diff) - bound > worst_margin) {
                        worst_margin = std::abs(diff) - bound;
                        worst_point =
                            note("gamma %.0f k %d T %+.0f dB (diff %+.4f, bound %.4f)",
                                 gamma, reuse_k, mc.threshold_db, diff, bound);
                    }
                    INFO("gamma ", gamma, " k ", reuse_k, " T ", mc.threshold_db,
                         " dB: diff ", diff, ", bound ", bound);
                    ACCEPT(crit, std::abs(diff) <= bound);
                }
            }
        }
        const double elapsed = seconds_since(start);
        ACCEPT(crit, points == 18);
        ACCEPT(crit, elapsed < 300.0);
        crit.summary = note("18 grid points in %.0f s, worst |diff|-bound %+.4f at %s",
                            elapsed, worst_margin, worst_point.c_str());
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 3: one-slot handover equals outage; three-slot estimate matches the M_m constants") {
    Criterion crit{3};
    try {
        // The one-slot identity across all three analytic dispatch routes:
        // closed form, reduced quadrature with noise, full quadrature.
        double worst_rel = 0.0;
        std::vector<PropagationEnvironment> routes;
        routes.push_back(base_env(4.0, 1));
        routes.push_back(base_env(4.0, 1));
        routes.back().noise = 1e-9;
        {
            PropagationEnvironment env = base_env(3.5, 1);
            env.pathloss = PathLossModel::modified(0.01, 3.5, 50.0);
            env.shadowing = ShadowingModel::lognormal(8.0);
            env.noise = 1e-9;
            routes.push_back(env);
        }
        for (const auto& env : routes) {
            const CoverageQuery query{env, 10.0, 1};
            const double p_out = outage_probability(query);
            const double p_ho = handover_probability(query);
            worst_rel = std::max(worst_rel, std::abs(p_ho - p_out) / p_out);
        }
        ACCEPT(crit, worst_rel <= 1e-10);

        // Three consecutive slots, gamma 4, k 1, T 10 dB, noise off:
        // p_ho = 1 - 3/M_1 + 3/M_2 - 1/M_3.
        const auto beam = BeamPattern::omni();
        const double m1 = m_m_constant(1, 10.0, 4.0, beam, 1);
        const double m2 = m_m_constant(1, 10.0, 4.0, beam, 2);
        const double m3 = m_m_constant(1, 10.0, 4.0, beam, 3);
        const double exact = 1.0 - 3.0 / m1 + 3.0 / m2 - 1.0 / m3;

        SimConfig sim;
        sim.region_radius = 10000.0;
        sim.n_snapshots = 10000;
        sim.seed = 303;
        const Estimate est = estimate_handover(base_env(4.0, 1), sim, 10.0, 3);
        const double diff = est.mean - exact;
        ACCEPT(crit, std::abs(diff) <= 3.0 * est.std_error);
        crit.summary =
            note("one-slot identity rel %.1e; 3-slot MC diff %+.4f vs 3 sigma %.4f",
                 worst_rel, diff, 3.0 * est.std_error);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 4: sampled path-gain process matches its law in distribution and counts") {
    Criterion crit{4};
    try {
        // Serving-level CCDF under lognormal shadowing, 1e5 snapshots.
        PropagationEnvironment env;
        env.lambda_b = 1.0;
        env.pathloss = PathLossModel::exponent(1.0, 4.0);
        env.shadowing = ShadowingModel::lognormal(8.0);
        SimConfig sim;
        sim.region_radius = std::sqrt(100.0 / kPi);
        sim.n_snapshots = 1;
        sim.seed = 23;

        const long n_ks = 100000;
        std::vector<double> xi0;
        xi0.reserve(n_ks);
        for (long i = 0; i < n_ks; ++i) {
            const auto snap = sample_snapshot(
                env, sim, RngStream(sim.seed, (static_cast<std::uint64_t>(i) << 16) | 1u));
            xi0.push_back(snap.serving_xi);
        }
        std::sort(xi0.begin(), xi0.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < xi0.size(); ++i) {
            const double f = 1.0 - xi_ccdf(env, 0, xi0[i]);
            ks = std::max(ks, std::abs(f - static_cast<double>(i) / n_ks));
            ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n_ks));
        }
        ACCEPT(crit, ks < 0.01);

        // Counts below three levels are Poisson: mean and variance each equal
        // the cumulative intensity lambda B(t) = pi sqrt(t) within 3 SE.
        PropagationEnvironment unit = env;
        unit.shadowing = ShadowingModel::none();
        SimConfig count_sim = sim;
        count_sim.seed = 29;

        const std::vector<double> mass = {0.1, 1.0, 10.0};
        std::vector<double> level(mass.size());
        for (std::size_t j = 0; j < mass.size(); ++j)
            level[j] = (mass[j] / kPi) * (mass[j] / kPi);

        const long n = 10000;
        std::vector<double> sum(mass.size(), 0.0);
        std::vector<double> sum_sq(mass.size(), 0.0);
        for (long i = 0; i < n; ++i) {
            const auto snap = sample_snapshot(
                unit, count_sim,
                RngStream(count_sim.seed, (static_cast<std::uint64_t>(i) << 16) | 1u));
            for (std::size_t j = 0; j < mass.size(); ++j) {
                double count = snap.serving_xi <= level[j] ? 1.0 : 0.0;
                for (const auto& bs : snap.interferers) count += bs.xi <= level[j];
                sum[j] += count;
                sum_sq[j] += count * count;
            }
        }
        double worst_mean_z = 0.0;
        double worst_var_z = 0.0;
        for (std::size_t j = 0; j < mass.size(); ++j) {
            const double mean = sum[j] / n;
            const double var = (sum_sq[j] - n * mean * mean) / (n - 1.0);
            const double mean_se = std::sqrt(mass[j] / n);
            const double var_se =
                std::sqrt((mass[j] + 2.0 * mass[j] * mass[j]) / n);
            worst_mean_z = std::max(worst_mean_z, std::abs(mean - mass[j]) / mean_se);
            worst_var_z = std::max(worst_var_z, std::abs(var - mass[j]) / var_se);
            ACCEPT(crit, std::abs(mean - mass[j]) <= 3.0 * mean_se);
            ACCEPT(crit, std::abs(var - mass[j]) <= 3.0 * var_se);
        }
        crit.summary = note("KS %.4f (< 0.01); count z-scores: mean %.2f, var %.2f (< 3)",
                            ks, worst_mean_z, worst_var_z);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 5: analytic outage is invariant under density, fading-rate, and moment-equivalent swaps") {
    Criterion crit{5};
    try {
        const CoverageQuery base{base_env(4.0, 3), 10.0, 1};
        const double p0 = outage_probability(base);
        double worst_abs = 0.0;

        CoverageQuery scaled = base;
        scaled.env.lambda_b *= 10.0;
        worst_abs = std::max(worst_abs, std::abs(outage_probability(scaled) - p0));

        scaled = base;
        scaled.env.mu *= 10.0;
        worst_abs = std::max(worst_abs, std::abs(outage_probability(scaled) - p0));

        scaled = base;
        scaled.env.shadowing = ShadowingModel::lognormal(8.0);
        worst_abs = std::max(worst_abs, std::abs(outage_probability(scaled) - p0));
        ACCEPT(crit, worst_abs <= 1e-9);

        // With noise the shadowing law matters only through E[H^{2/gamma}]:
        // folding that moment into the density must not move the answer.
        CoverageQuery noisy = base;
        noisy.env.noise = 1e-9;
        noisy.env.shadowing = ShadowingModel::lognormal(8.0);
        CoverageQuery folded = noisy;
        folded.env.shadowing = ShadowingModel::none();
        folded.env.lambda_b *=
            fractional_moment(ShadowingModel::lognormal(8.0), 2.0 / 4.0);
        const double fold_abs =
            std::abs(outage_probability(folded) - outage_probability(noisy));
        ACCEPT(crit, fold_abs <= 1e-9);

        // Only the product mu N enters: (mu, N) and (10 mu, N/10) coincide.
        double worst_rel = 0.0;
        for (double gamma : {4.0, 3.0}) {
            CoverageQuery lhs{base_env(gamma, 3), 10.0, 1};
            lhs.env.noise = 1e-9;
            CoverageQuery rhs = lhs;
            rhs.env.mu *= 10.0;
            rhs.env.noise /= 10.0;
            const double pl = outage_probability(lhs);
            const double pr = outage_probability(rhs);
            worst_rel = std::max(worst_rel, std::abs(pl - pr) / pl);
        }
        ACCEPT(crit, worst_rel <= 1e-10);
        crit.summary = note(
            "swap error %.1e abs, moment fold %.1e abs, mu/noise trade %.1e rel",
            worst_abs, fold_abs, worst_rel);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 6: hexagonal baseline sits below the Poisson curve with the expected dB gap") {
    Criterion crit{6};
    try {
        ModelSelection models;
        models.poisson_mc = false;
        std::string gaps;
        double worst_violation = 0.0;
        for (double gamma : {4.0, 3.0}) {
            const auto rows = run_sweep(figure_config(gamma), models);
            ACCEPT(crit, rows.size() == 38);
            for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
                const ResultRow& analytic = rows[i];
                const ResultRow& hex = rows[i + 1];
                const bool usable = analytic.model == "poisson_analytic" &&
                                    hex.model == "hexagonal_mc" &&
                                    analytic.error.empty() && hex.error.empty() &&
                                    analytic.p_outage.has_value() &&
                                    hex.p_outage.has_value() &&
                                    hex.p_outage_stderr.has_value();
                ACCEPT(crit, usable);
                if (!usable) continue;
                const double slack =
                    *hex.p_outage - 3.0 * *hex.p_outage_stderr - *analytic.p_outage;
                worst_violation = std::max(worst_violation, slack);
                INFO("gamma ", gamma, " T ", hex.threshold_db, " dB");
                ACCEPT(crit, slack <= 0.0);
            }
            const GapReport report = compare_models(rows, 0.5);
            const double target = gamma == 4.0 ? 8.0 : 6.0;
            INFO("gamma ", gamma, " gap ", report.gap_db, " dB, target ", target);
            ACCEPT(crit, std::abs(report.gap_db - target) <= 3.0);
            gaps += note("%sgamma %.0f gap %+.2f dB (target %.0f +- 3)",
                         gaps.empty() ? "" : "; ", gamma, report.gap_db, target);
        }
        crit.summary = note("%s; max lattice-above-Poisson excursion %+.4f",
                            gaps.c_str(), worst_violation);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 7: outage moves the right way along every model axis") {
    Criterion crit{7};
    try {
        const double slack = 1e-12;
        bool threshold_ok = true;
        for (double noise : {0.0, 1e-9}) {
            double prev = -1.0;
            for (double t_db = -10.0; t_db <= 20.0; t_db += 2.0) {
                CoverageQuery query{base_env(4.0, 1), std::pow(10.0, t_db / 10.0), 1};
                query.env.noise = noise;
                const double p = outage_probability(query);
                threshold_ok = threshold_ok && p >= prev - slack;
                prev = p;
            }
        }
        ACCEPT(crit, threshold_ok);

        bool mu_ok = true;
        {
            double prev = -1.0;
            for (double mu : {0.5, 1.0, 2.0, 4.0}) {
                CoverageQuery query{base_env(4.0, 1), 10.0, 1};
                query.env.noise = 1e-9;
                query.env.mu = mu;
                const double p = outage_probability(query);
                mu_ok = mu_ok && p >= prev - slack;
                prev = p;
            }
        }
        ACCEPT(crit, mu_ok);

        bool reuse_ok = true;
        for (double gamma : {3.0, 4.0}) {
            double prev = 2.0;
            for (int reuse_k : {1, 3, 4, 7, 12}) {
                const double p = outage_probability({base_env(gamma, reuse_k), 10.0, 1});
                reuse_ok = reuse_ok && p <= prev + slack;
                prev = p;
            }
        }
        ACCEPT(crit, reuse_ok);

        bool gamma_ok = true;
        for (int reuse_k : {1, 7}) {
            double prev = 2.0;
            for (double gamma : {2.5, 3.0, 3.5, 4.0, 4.5, 5.0}) {
                const double p = outage_probability({base_env(gamma, reuse_k), 10.0, 1});
                gamma_ok = gamma_ok && p <= prev + slack;
                prev = p;
            }
        }
        ACCEPT(crit, gamma_ok);

        // An 8-element array can only narrow the interference cone.
        bool beam_ok = true;
        for (double gamma : {3.0, 4.0})
            for (int reuse_k : {1, 3, 7})
                for (double t_db : {-10.0, 0.0, 10.0}) {
                    const double threshold = std::pow(10.0, t_db / 10.0);
                    CoverageQuery omni{base_env(gamma, reuse_k), threshold, 1};
                    CoverageQuery steered = omni;
                    steered.env.beam = BeamPattern::conventional(8);
                    beam_ok = beam_ok && outage_probability(steered) <=
                                             outage_probability(omni) + slack;
                }
        ACCEPT(crit, beam_ok);

        // Covering m slots is harder than covering m-1.
        bool qm_ok = true;
        for (double noise : {0.0, 1e-9}) {
            CoverageQuery query{base_env(4.0, 1), 10.0, 1};
            query.env.noise = noise;
            double prev = 2.0;
            for (int m = 1; m <= 6; ++m) {
                const double q = q_m(query, m);
                qm_ok = qm_ok && q <= prev + slack;
                prev = q;
            }
        }
        ACCEPT(crit, qm_ok);
        crit.summary = note(
            "threshold %s, fading rate %s, reuse %s, exponent %s, beam %s, q_m %s",
            threshold_ok ? "up" : "VIOLATED", mu_ok ? "up" : "VIOLATED",
            reuse_ok ? "down" : "VIOLATED", gamma_ok ? "down" : "VIOLATED",
            beam_ok ? "helps" : "VIOLATED", qm_ok ? "down" : "VIOLATED");
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 8: sweep CSV is byte-identical across reruns and worker counts") {
    Criterion crit{8};
    try {
        const auto start = std::chrono::steady_clock::now();
        ModelSelection models;
        models.hexagonal_mc = false;
        std::size_t bytes = 0;
        bool identical = true;
        for (double gamma : {3.0, 4.0}) {
            for (int reuse_k : {1, 3, 7}) {
                ExperimentConfig config = grid_config(gamma, reuse_k);
                config.workers = 1;
                const std::string first = render_csv(config, run_sweep(config, models));
                config.workers = 3;
                const std::string second = render_csv(config, run_sweep(config, models));
                ACCEPT(crit, !first.empty());
                INFO("gamma ", gamma, " k ", reuse_k);
                ACCEPT(crit, first == second);
                identical = identical && first == second;
                bytes += first.size();
            }
        }
        crit.summary = note("6 sweeps %s across workers 1 and 3 (%zu bytes, %.0f s)",
                            identical ? "byte-identical" : "DIVERGED", bytes,
                            seconds_since(start));
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}

TEST_CASE("criterion 9: intensity derivative and noise closed form agree with independent routes") {
    Criterion crit{9};
    try {
        // B' against central differences of B, nine decades around the scale
        // where one BS is expected below the level.
        std::vector<PropagationEnvironment> envs;
        envs.push_back(base_env(4.0, 1));
        envs.push_back(base_env(3.0, 1));
        envs.push_back(base_env(4.0, 1));
        envs.back().shadowing = ShadowingModel::lognormal(8.0);
        {
            PropagationEnvironment env = base_env(3.5, 1);
            env.pathloss = PathLossModel::modified(0.01, 3.5, 50.0);
            env.shadowing = ShadowingModel::lognormal(6.0);
            envs.push_back(env);
        }
        double worst_fd = 0.0;
        for (const auto& env : envs) {
            double beta0 = 1.0;
            while (env.lambda_b * b_of(env, beta0) < 1.0) beta0 *= 2.0;
            while (env.lambda_b * b_of(env, beta0) >= 2.0) beta0 /= 2.0;
            for (int decade = -4; decade <= 4; ++decade) {
                const double beta = beta0 * std::pow(10.0, decade);
                const double hi = beta * (1.0 + 1e-6);
                const double lo = beta * (1.0 - 1e-6);
                const double fd = (b_of(env, hi) - b_of(env, lo)) / (hi - lo);
                const double rel = std::abs(fd - b_prime_of(env, beta)) /
                                   b_prime_of(env, beta);
                worst_fd = std::max(worst_fd, rel);
            }
        }
        ACCEPT(crit, worst_fd <= 1e-5);

        // gamma = 4 with noise: scaled-erfc closed form against the reduced
        // quadrature, spanning both small and asymptotic erfc arguments.
        double worst_closed = 0.0;
        for (int reuse_k : {1, 7})
            for (double threshold : {0.1, 10.0})
                for (double noise : {1e-16, 1e-12, 1e-9, 1e-6}) {
                    CoverageQuery query{base_env(4.0, reuse_k), threshold, 1};
                    query.env.noise = noise;
                    const double closed = outage_exponent_gamma4_closed(query);
                    const double reduced = outage_exponent_reduced(query);
                    worst_closed = std::max(
                        worst_closed, std::abs(closed - reduced) / reduced);
                }
        ACCEPT(crit, worst_closed <= 1e-8);
        crit.summary = note("B' finite-difference rel %.1e; closed vs quadrature rel %.1e",
                            worst_fd, worst_closed);
    } catch (const std::exception& e) {
        ACCEPT(crit, false);
        crit.summary = note("unexpected exception: %s", e.what());
    }
}
