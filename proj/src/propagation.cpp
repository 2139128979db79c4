#include "cellcov/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cellcov {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

PathLossModel PathLossModel::exponent(double k_gain, double gamma) {
    require(std::isfinite(k_gain) && k_gain > 0.0, "PathLossModel: K must be > 0");
    require(std::isfinite(gamma) && gamma > 2.0, "PathLossModel: gamma must be > 2");
    return {Kind::kExponent, k_gain, gamma, 0.0};
}

PathLossModel PathLossModel::modified(double k_gain, double gamma, double r0) {
    require(std::isfinite(k_gain) && k_gain > 0.0, "PathLossModel: K must be > 0");
    require(std::isfinite(gamma) && gamma > 2.0, "PathLossModel: gamma must be > 2");
    require(std::isfinite(r0) && r0 >= 0.0, "PathLossModel: r0 must be >= 0");
    return {Kind::kModifiedExponent, k_gain, gamma, r0};
}

double path_loss(const PathLossModel& model, double r) {
    const double d =
        model.kind == PathLossModel::Kind::kModifiedExponent ? std::max(r, model.r0)
                                                             : r;
    return model.k_gain * std::pow(d, -model.gamma);
}

ShadowingModel ShadowingModel::none() { return {Kind::kNone, 0.0}; }

ShadowingModel ShadowingModel::lognormal(double sigma_db) {
    require(std::isfinite(sigma_db) && sigma_db >= 0.0,
            "ShadowingModel: sigma_db must be >= 0");
    return {Kind::kLognormal, sigma_db};
}

double ShadowingModel::sigma1() const { return sigma_db * std::numbers::ln10 / 10.0; }

bool ShadowingModel::degenerate() const {
    return kind == Kind::kNone || sigma_db == 0.0;
}

double shadowing_ccdf(const ShadowingModel& shadowing, double t) {
    if (t <= 0.0) return 1.0;
    if (shadowing.degenerate()) return t <= 1.0 ? 1.0 : 0.0;
    return q_function(std::log(t) / shadowing.sigma1());
}

double shadowing_density(const ShadowingModel& shadowing, double t) {
    if (shadowing.degenerate() || t <= 0.0) return 0.0;
    const double s1 = shadowing.sigma1();
    const double z = std::log(t) / s1;
    return std::exp(-0.5 * z * z) / (t * s1 * std::sqrt(2.0 * kPi));
}

double fractional_moment(const ShadowingModel& shadowing, double s) {
    require(s > 0.0 && s <= 1.0, "fractional_moment: s must be in (0,1]");
    if (shadowing.degenerate()) return 1.0;
    const double s1 = shadowing.sigma1();
    return std::exp(0.5 * s * s * s1 * s1);
}

double upper_fractional_moment(const ShadowingModel& shadowing, double s,
                               double x0) {
    require(s > 0.0 && s <= 1.0, "upper_fractional_moment: s must be in (0,1]");
    if (shadowing.degenerate()) return x0 <= 1.0 ? 1.0 : 0.0;
    const double s1 = shadowing.sigma1();
    const double full = std::exp(0.5 * s * s * s1 * s1);
    if (x0 <= 0.0) return full;
    // E[H^s; H >= x0] = E[e^{s sigma1 Z}; Z >= ln(x0)/sigma1]
    //                 = e^{s^2 sigma1^2/2} Q(ln(x0)/sigma1 - s sigma1).
    return full * q_function(std::log(x0) / s1 - s * s1);
}

double sample_shadowing(const ShadowingModel& shadowing, RngStream& stream) {
    if (shadowing.kind == ShadowingModel::Kind::kLognormal)
        return std::exp(shadowing.sigma1() * stream.next_normal());
    return 1.0;
}

BeamPattern BeamPattern::omni() { return {Kind::kOmni, 1}; }

BeamPattern BeamPattern::conventional(int n_t) {
    require(n_t >= 1, "BeamPattern: n_t must be >= 1");
    return {Kind::kConventional, n_t};
}

double gain_a(const BeamPattern& beam, double theta) {
    require(std::isfinite(theta), "gain_a: theta must be finite");
    if (beam.kind == BeamPattern::Kind::kOmni) return 1.0;
    if (std::abs(theta) >= kPi / 2.0) return 0.0;
    const double x = 0.5 * kPi * std::sin(theta);
    const double s = std::sin(x);
    if (std::abs(s) < 1e-9) return 1.0;  // removable singularity at broadside
    const double num = std::sin(beam.n_t * x);
    const double den = beam.n_t * s;
    return (num * num) / (den * den);
}

void validate(const PropagationEnvironment& env) {
    require(std::isfinite(env.lambda_b) && env.lambda_b > 0.0,
            "environment: lambda_b must be > 0");
    require(std::isfinite(env.p_tx) && env.p_tx > 0.0,
            "environment: p_tx must be > 0");
    require(std::isfinite(env.noise) && env.noise >= 0.0,
            "environment: noise must be >= 0");
    require(std::isfinite(env.mu) && env.mu > 0.0, "environment: mu must be > 0");
    require(env.reuse_k >= 1, "environment: reuse_k must be >= 1");
    require(std::isfinite(env.pathloss.k_gain) && env.pathloss.k_gain > 0.0,
            "environment: path loss K must be > 0");
    require(std::isfinite(env.pathloss.gamma) && env.pathloss.gamma > 2.0,
            "environment: path loss gamma must be > 2");
    require(std::isfinite(env.pathloss.r0) && env.pathloss.r0 >= 0.0,
            "environment: path loss r0 must be >= 0");
    require(std::isfinite(env.shadowing.sigma_db) && env.shadowing.sigma_db >= 0.0,
            "environment: shadowing sigma_db must be >= 0");
    require(env.beam.n_t >= 1, "environment: beam n_t must be >= 1");
}

double exponent_model_c(const PropagationEnvironment& env) {
    require(env.pathloss.kind == PathLossModel::Kind::kExponent,
            "exponent_model_c: path loss model is not the plain exponent model");
    const double g = env.pathloss.gamma;
    const double pk = env.p_tx * env.pathloss.k_gain;
    return kPi * std::pow(pk, 2.0 / g) * fractional_moment(env.shadowing, 2.0 / g);
}

double b_of(const PropagationEnvironment& env, double beta) {
    require(std::isfinite(beta) && beta >= 0.0, "b_of: beta must be >= 0");
    if (beta == 0.0) return 0.0;
    const double g = env.pathloss.gamma;
    const double pk = env.p_tx * env.pathloss.k_gain;
    if (env.pathloss.kind == PathLossModel::Kind::kExponent ||
        env.pathloss.r0 == 0.0) {
        return kPi * std::pow(pk * beta, 2.0 / g) *
               fractional_moment(env.shadowing, 2.0 / g);
    }
    const double x0 = std::pow(env.pathloss.r0, g) / (pk * beta);
    return kPi * std::pow(pk * beta, 2.0 / g) *
           upper_fractional_moment(env.shadowing, 2.0 / g, x0);
}

double b_prime_of(const PropagationEnvironment& env, double beta) {
    require(std::isfinite(beta) && beta > 0.0, "b_prime_of: beta must be > 0");
    const double g = env.pathloss.gamma;
    if (env.pathloss.kind == PathLossModel::Kind::kExponent ||
        env.pathloss.r0 == 0.0) {
        const double c = kPi * std::pow(env.p_tx * env.pathloss.k_gain, 2.0 / g) *
                         fractional_moment(env.shadowing, 2.0 / g);
        return (2.0 * c / g) * std::pow(beta, 2.0 / g - 1.0);
    }
    const double r0 = env.pathloss.r0;
    const double x0 = std::pow(r0, g) / (env.p_tx * env.pathloss.k_gain * beta);
    return (2.0 / g) * b_of(env, beta) / beta +
           kPi * r0 * r0 * shadowing_density(env.shadowing, x0) * x0 / beta;
}

double b_of_numeric(const PropagationEnvironment& env, double beta) {
    require(std::isfinite(beta) && beta >= 0.0, "b_of_numeric: beta must be >= 0");
    if (beta == 0.0) return 0.0;
    const auto f = [&](double r) {
        const double lp = path_loss(env.pathloss, r) * env.p_tx;
        return 2.0 * kPi * r * shadowing_ccdf(env.shadowing, 1.0 / (lp * beta));
    };
    const double g = env.pathloss.gamma;
    const double r_star =
        std::pow(env.p_tx * env.pathloss.k_gain * beta, 1.0 / g);
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.max_subdivisions = 5000;
    const auto r = integrate_semi_infinite(f, 0.0, spec,
                                           std::max(r_star, env.pathloss.r0));
    return require_converged(r, "b_of_numeric");
}

double b_prime_of_numeric(const PropagationEnvironment& env, double beta) {
    require(std::isfinite(beta) && beta > 0.0, "b_prime_of_numeric: beta must be > 0");
    require(!env.shadowing.degenerate(),
            "b_prime_of_numeric: needs a continuous shadowing density");
    const auto f = [&](double r) {
        const double lp = path_loss(env.pathloss, r) * env.p_tx;
        return 2.0 * kPi * r * shadowing_density(env.shadowing, 1.0 / (lp * beta)) /
               (lp * beta * beta);
    };
    const double g = env.pathloss.gamma;
    const double r_star =
        std::pow(env.p_tx * env.pathloss.k_gain * beta, 1.0 / g);
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.max_subdivisions = 5000;
    const auto r = integrate_semi_infinite(f, 0.0, spec,
                                           std::max(r_star, env.pathloss.r0));
    return require_converged(r, "b_prime_of_numeric");
}

double xi_ccdf(const PropagationEnvironment& env, int m, double t) {
    require(m >= 0, "xi_ccdf: m must be >= 0");
    require(std::isfinite(t) && t >= 0.0, "xi_ccdf: t must be >= 0");
    const double x = env.lambda_b * b_of(env, t);
    double term = std::exp(-x);
    double sum = term;
    for (int i = 1; i <= m; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::min(sum, 1.0);
}

double xi_density(const PropagationEnvironment& env, int m, double t) {
    require(m >= 0, "xi_density: m must be >= 0");
    require(std::isfinite(t) && t > 0.0, "xi_density: t must be > 0");
    const double x = env.lambda_b * b_of(env, t);
    double pmf = std::exp(-x);
    for (int i = 1; i <= m; ++i) pmf *= x / i;
    return env.lambda_b * b_prime_of(env, t) * pmf;
}

}  // namespace cellcov
