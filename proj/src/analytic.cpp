#include "cellcov/analytic.hpp"

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

void require_query(const CoverageQuery& query) {
    validate(query.env);
    require(std::isfinite(query.threshold) && query.threshold > 0.0,
            "CoverageQuery: threshold must be > 0");
    require(query.slots >= 1, "CoverageQuery: slots must be >= 1");
}

bool is_exponent_like(const PathLossModel& m) {
    return m.kind == PathLossModel::Kind::kExponent || m.r0 == 0.0;
}

// The modified model with a point-mass H puts an atom into the path-loss
// process, which the coverage integrals cannot represent.
void reject_atomic_process(const PropagationEnvironment& env, const char* who) {
    if (!is_exponent_like(env.pathloss) && env.shadowing.degenerate()) {
        throw std::invalid_argument(
            std::string(who) +
            ": capped path loss with degenerate shadowing concentrates mass at "
            "a single path-gain value; use lognormal shadowing or the plain "
            "exponent model");
    }
}

// 1 - (1/(1+x))^m, accurate for small x.
inline double one_minus_inv_pow(double x, int m) {
    return -std::expm1(-static_cast<double>(m) * std::log1p(x));
}

// exp(y^2) erfc(y) for y >= 0 without overflow.
double erfcx_positive(double y) {
    if (y <= 20.0) return std::exp(y * y) * std::erfc(y);
    // Asymptotic tail: erfcx(y) = (1/(y sqrt(pi))) (1 - u + 3u^2 - 15u^3 + 105u^4),
    // u = 1/(2y^2); truncation below 1e-11 relative for y > 20.
    const double u = 1.0 / (2.0 * y * y);
    const double series = 1.0 + u * (-1.0 + u * (3.0 + u * (-15.0 + u * 105.0)));
    return series / (y * std::sqrt(kPi));
}

// Solves lambda B(beta) + N T mu beta = 1 by bisection; the unit-exponent
// point of the coverage integrand, used as the quadrature scale.
double unit_exponent_scale(const PropagationEnvironment& env, double threshold) {
    const double ntmu = env.noise * threshold * env.mu;
    auto g = [&](double beta) {
        return env.lambda_b * b_of(env, beta) + ntmu * beta;
    };
    double hi = 1.0;
    while (g(hi) < 1.0 && hi < 1e300) hi *= 4.0;
    double lo = hi;
    while (g(lo) > 1.0 && lo > 1e-300) lo /= 4.0;
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = std::sqrt(lo * hi);
        (g(mid) < 1.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

// Evaluates int_{-pi}^{pi} f(a(theta)) dtheta, exploiting that the pattern is
// even and (for the array) vanishes beyond +-pi/2.
double integrate_over_pattern(const BeamPattern& beam,
                              const std::function<double(double)>& f,
                              const char* context) {
    if (beam.kind == BeamPattern::Kind::kOmni) return 2.0 * kPi * f(1.0);
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    spec.max_subdivisions = 4000;
    const auto r = integrate([&](double theta) { return f(gain_a(beam, theta)); },
                             0.0, kPi / 2.0, spec);
    return 2.0 * require_converged(r, context);
}

struct JointCoverageTerms {
    int m = 1;  // joint-coverage slot count; m = 1 recovers the outage integral
};

// The full coverage quadrature
//   int lambda B'(beta) e^{-lambda B(beta) - m N T mu beta
//                          - (lambda/2pi k) D_m(beta)} dbeta
// via alpha = lambda B(beta) for the exponent model (where B is invertible in
// closed form) and directly in beta otherwise.
double joint_coverage_quadrature(const CoverageQuery& query, JointCoverageTerms t) {
    const auto& env = query.env;
    reject_atomic_process(env, "coverage quadrature");
    const double T = query.threshold;
    const double lam = env.lambda_b;
    const double noise_rate = t.m * env.noise * T * env.mu;
    const double interference_scale = lam / (2.0 * kPi * env.reuse_k);

    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    spec.max_subdivisions = 4000;

    if (is_exponent_like(env.pathloss)) {
        const double c = exponent_model_c(env);
        const double half_gamma = env.pathloss.gamma / 2.0;
        const auto f = [&](double alpha) {
            if (alpha <= 0.0) return 1.0;
            if (alpha > 745.0) return 0.0;  // exp(-alpha) underflows to zero
            const double beta = std::pow(alpha / (lam * c), half_gamma);
            if (!std::isfinite(beta)) return 0.0;
            if (beta <= 0.0) return std::exp(-alpha);  // underflowed serving level
            const double expo = alpha + noise_rate * beta +
                                interference_scale * d_m_of(env, beta, T, t.m);
            return std::exp(-expo);
        };
        const auto r = integrate_semi_infinite(f, 0.0, spec, 1.0);
        return require_converged(r, "coverage quadrature (exponent, alpha)");
    }

    const auto f = [&](double beta) {
        if (beta <= 0.0) return 0.0;
        const double expo = lam * b_of(env, beta) + noise_rate * beta +
                            interference_scale * d_m_of(env, beta, T, t.m);
        return lam * b_prime_of(env, beta) * std::exp(-expo);
    };
    const auto r = integrate_semi_infinite(f, 0.0, spec,
                                           unit_exponent_scale(env, T));
    return require_converged(r, "coverage quadrature (beta)");
}

// Neumaier-compensated accumulator for the alternating handover sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

}  // namespace

double m_m_constant(int reuse_k, double threshold, double gamma,
                    const BeamPattern& beam, int m) {
    require(reuse_k >= 1, "m_m_constant: reuse_k must be >= 1");
    require(std::isfinite(threshold) && threshold > 0.0,
            "m_m_constant: threshold must be > 0");
    require(std::isfinite(gamma) && gamma > 2.0, "m_m_constant: gamma must be > 2");
    require(m >= 1, "m_m_constant: m must be >= 1");

    const auto inner = [&](double a) {
        if (a <= 0.0) return 0.0;
        const double ta = threshold * a;
        QuadratureSpec spec;
        spec.rel_tol = 1e-10;
        spec.max_subdivisions = 4000;
        const auto r = integrate_semi_infinite(
            [&](double u) {
                return one_minus_inv_pow(ta * std::pow(u, -gamma / 2.0), m);
            },
            1.0, spec, std::max(1.0, std::pow(m * ta, 2.0 / gamma)));
        return require_converged(r, "m_m_constant inner integral");
    };
    const double integral =
        integrate_over_pattern(beam, inner, "m_m_constant pattern integral");
    return 1.0 + integral / (2.0 * kPi * reuse_k);
}

AnalyticConstants analytic_constants(const CoverageQuery& query) {
    require_query(query);
    const auto& env = query.env;
    AnalyticConstants out;
    out.c = exponent_model_c(env);
    out.g = env.noise * query.threshold * env.mu *
            std::pow(env.lambda_b * out.c, -env.pathloss.gamma / 2.0);
    out.m_m.reserve(query.slots);
    for (int m = 1; m <= query.slots; ++m) {
        out.m_m.push_back(m_m_constant(env.reuse_k, query.threshold,
                                       env.pathloss.gamma, env.beam, m));
    }
    return out;
}

double d_m_of(const PropagationEnvironment& env, double beta, double threshold,
              int m) {
    require(std::isfinite(beta) && beta > 0.0, "d_m_of: beta must be > 0");
    require(std::isfinite(threshold) && threshold > 0.0,
            "d_m_of: threshold must be > 0");
    require(m >= 1, "d_m_of: m must be >= 1");

    const auto inner = [&](double a) {
        if (a <= 0.0) return 0.0;
        const double tba = threshold * beta * a;
        QuadratureSpec spec;
        spec.rel_tol = 1e-9;
        spec.max_subdivisions = 4000;
        const auto r = integrate_semi_infinite(
            [&](double xi) {
                return b_prime_of(env, xi) * one_minus_inv_pow(tba / xi, m);
            },
            beta, spec, std::max(beta, m * tba));
        return require_converged(r, "d_m_of inner integral");
    };
    return integrate_over_pattern(env.beam, inner, "d_m_of pattern integral");
}

double d_of(const PropagationEnvironment& env, double beta, double threshold) {
    return d_m_of(env, beta, threshold, 1);
}

double coverage_given_xi0(const PropagationEnvironment& env, double beta,
                          double threshold) {
    validate(env);
    const double expo =
        env.noise * threshold * env.mu * beta +
        env.lambda_b / (2.0 * kPi * env.reuse_k) * d_of(env, beta, threshold);
    return std::exp(-expo);
}

double outage_probability_quadrature(const CoverageQuery& query) {
    require_query(query);
    return 1.0 - joint_coverage_quadrature(query, {1});
}

double outage_exponent_reduced(const CoverageQuery& query) {
    require_query(query);
    const auto& env = query.env;
    require(is_exponent_like(env.pathloss),
            "outage_exponent_reduced: needs the exponent path loss model");
    const double m1 = m_m_constant(env.reuse_k, query.threshold,
                                   env.pathloss.gamma, env.beam, 1);
    const double c = exponent_model_c(env);
    const double g = env.noise * query.threshold * env.mu *
                     std::pow(env.lambda_b * c, -env.pathloss.gamma / 2.0);
    const double half_gamma = env.pathloss.gamma / 2.0;
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    const auto r = integrate_semi_infinite(
        [&](double a) {
            return std::exp(-m1 * a - g * std::pow(a, half_gamma));
        },
        0.0, spec, 1.0 / m1);
    return 1.0 - require_converged(r, "outage_exponent_reduced");
}

double outage_exponent_gamma4_closed(const CoverageQuery& query) {
    require_query(query);
    const auto& env = query.env;
    require(is_exponent_like(env.pathloss) && env.pathloss.gamma == 4.0,
            "outage_exponent_gamma4_closed: needs the exponent model with gamma=4");
    require(env.noise > 0.0, "outage_exponent_gamma4_closed: needs N > 0");
    const double m1 = m_m_constant(env.reuse_k, query.threshold,
                                   env.pathloss.gamma, env.beam, 1);
    const double c = exponent_model_c(env);
    const double g = env.noise * query.threshold * env.mu /
                     std::pow(env.lambda_b * c, 2.0);
    // int_0^inf e^{-M a - G a^2} da = (1/2) sqrt(pi/G) e^{M^2/4G} erfc(M/(2 sqrt G)).
    const double y = m1 / (2.0 * std::sqrt(g));
    return 1.0 - 0.5 * std::sqrt(kPi / g) * erfcx_positive(y);
}

double outage_probability(const CoverageQuery& query) {
    require_query(query);
    const auto& env = query.env;
    if (is_exponent_like(env.pathloss)) {
        if (env.noise == 0.0) {
            return 1.0 - 1.0 / m_m_constant(env.reuse_k, query.threshold,
                                            env.pathloss.gamma, env.beam, 1);
        }
        return outage_exponent_reduced(query);
    }
    return outage_probability_quadrature(query);
}

double q_m_quadrature(const CoverageQuery& query, int m) {
    require_query(query);
    require(m >= 1, "q_m_quadrature: m must be >= 1");
    return joint_coverage_quadrature(query, {m});
}

double q_m(const CoverageQuery& query, int m) {
    require_query(query);
    require(m >= 1, "q_m: m must be >= 1");
    const auto& env = query.env;
    if (is_exponent_like(env.pathloss)) {
        const double mm = m_m_constant(env.reuse_k, query.threshold,
                                       env.pathloss.gamma, env.beam, m);
        if (env.noise == 0.0) return 1.0 / mm;
        const double c = exponent_model_c(env);
        const double g = env.noise * query.threshold * env.mu *
                         std::pow(env.lambda_b * c, -env.pathloss.gamma / 2.0);
        const double half_gamma = env.pathloss.gamma / 2.0;
        QuadratureSpec spec;
        spec.rel_tol = 1e-11;
        const auto r = integrate_semi_infinite(
            [&](double a) {
                return std::exp(-mm * a - m * g * std::pow(a, half_gamma));
            },
            0.0, spec, 1.0 / mm);
        return require_converged(r, "q_m reduced quadrature");
    }
    return q_m_quadrature(query, m);
}

double handover_probability(const CoverageQuery& query) {
    require_query(query);
    const int n = query.slots;
    require(n <= 20, "handover_probability: slots capped at 20");

    CompensatedSum acc;
    acc.add(1.0);
    for (int m = 1; m <= n; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        acc.add(sign * binomial_coefficient(n, m) * q_m(query, m));
    }
    const double p = acc.total();
    if (p < -1e-9 || p > 1.0 + 1e-9) {
        throw std::runtime_error(
            "handover_probability: inclusion-exclusion sum " + std::to_string(p) +
            " left [0,1]; alternating-sum cancellation exceeded tolerance");
    }
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace cellcov
