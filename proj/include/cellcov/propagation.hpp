// propagation.hpp - physical-layer models (path loss, shadowing, beamforming)
// and the law of the path-loss-shadowing point process: the map B(beta), its
// derivative, and the order-statistic distributions of the process points.
#pragma once

#include "cellcov/numerics.hpp"

namespace cellcov {

// Path loss L(r) as a function of link distance r (meters). The modified
// variant caps the loss at its r = r0 value so L stays bounded near the
// transmitter.
struct PathLossModel {
    enum class Kind { kExponent, kModifiedExponent };

    Kind kind = Kind::kExponent;
    double k_gain = 1.0;  // linear gain K > 0
    double gamma = 4.0;   // decay exponent, > 2
    double r0 = 0.0;      // cap radius (meters), modified variant only

    static PathLossModel exponent(double k_gain, double gamma);
    static PathLossModel modified(double k_gain, double gamma, double r0);
};

// L(r); exponent: K r^-gamma, modified: K max(r, r0)^-gamma.
double path_loss(const PathLossModel& model, double r);

// Slow fading H. None is the degenerate H = 1; lognormal is H = 10^(G/10),
// G ~ N(0, sigma_db^2), i.e. ln H = sigma1 * Z with sigma1 = sigma_db ln10/10.
struct ShadowingModel {
    enum class Kind { kNone, kLognormal };

    Kind kind = Kind::kNone;
    double sigma_db = 0.0;

    static ShadowingModel none();
    static ShadowingModel lognormal(double sigma_db);

    double sigma1() const;
    // True when H is a point mass (None, or lognormal with sigma_db = 0).
    bool degenerate() const;
};

// F_H(t) = P(H >= t).
double shadowing_ccdf(const ShadowingModel& shadowing, double t);
// p_H(t); zero for the degenerate variants (no continuous part).
double shadowing_density(const ShadowingModel& shadowing, double t);
// E[H^s] for s in (0,1]; lognormal: exp(s^2 sigma1^2 / 2).
double fractional_moment(const ShadowingModel& shadowing, double s);
// E[H^s; H >= x0]; lognormal: exp(s^2 sigma1^2/2) Q(ln(x0)/sigma1 - s*sigma1).
double upper_fractional_moment(const ShadowingModel& shadowing, double s,
                               double x0);

// One draw of H: exp(sigma1 Z) for lognormal, the point mass 1 otherwise.
double sample_shadowing(const ShadowingModel& shadowing, RngStream& stream);

// Transmit beam pattern; Conventional is a uniform linear array of n_t
// elements at half-wavelength spacing steered broadside.
struct BeamPattern {
    enum class Kind { kOmni, kConventional };

    Kind kind = Kind::kOmni;
    int n_t = 1;

    static BeamPattern omni();
    static BeamPattern conventional(int n_t);
};

// a(theta) = sin^2(n_t (pi/2) sin(theta)) / (n_t^2 sin^2((pi/2) sin(theta)))
// for 0 < |theta| < pi/2, 1 at the broadside limit, 0 beyond +-pi/2.
double gain_a(const BeamPattern& beam, double theta);

// Everything the coverage formulas need about the radio environment. The SINR
// threshold and slot count are per-query parameters, not environment state.
struct PropagationEnvironment {
    double lambda_b = 1e-6;  // BS density per m^2
    double p_tx = 1.0;       // transmit power, mW
    PathLossModel pathloss;
    ShadowingModel shadowing;
    double noise = 0.0;  // N, mW
    double mu = 1.0;     // Rayleigh fast-fading rate
    int reuse_k = 1;     // frequency reuse factor
    BeamPattern beam;
};

// Throws std::invalid_argument naming the offending field.
void validate(const PropagationEnvironment& env);

// C = pi (P K)^{2/gamma} E[H^{2/gamma}], the prefactor of B(beta) = C
// beta^{2/gamma} under the plain exponent model. Throws for other models.
double exponent_model_c(const PropagationEnvironment& env);

// B(beta) = int_{R^2} F_H((L(z) P beta)^{-1}) dz, the mean measure of the
// path-loss-shadowing process on (0, beta].
//   exponent:  C beta^{2/gamma}
//   modified:  pi (P K beta)^{2/gamma} E[H^{2/gamma}; H >= x0],
//              x0 = r0^gamma / (P K beta)
double b_of(const PropagationEnvironment& env, double beta);

// dB/dbeta. Modified model: (2/gamma) B(beta)/beta
//                           + pi r0^2 p_H(x0) x0 / beta.
double b_prime_of(const PropagationEnvironment& env, double beta);

// Defining integrals evaluated by radial quadrature, as oracles for the
// closed forms. b_prime_of_numeric requires a continuous shadowing density.
double b_of_numeric(const PropagationEnvironment& env, double beta);
double b_prime_of_numeric(const PropagationEnvironment& env, double beta);

// P(xi_m > t) where xi_0 < xi_1 < ... are the ordered process points:
// exp(-lambda B(t)) sum_{i=0}^{m} (lambda B(t))^i / i!.
double xi_ccdf(const PropagationEnvironment& env, int m, double t);

// Density of xi_m: lambda^{m+1} B'(t) B(t)^m exp(-lambda B(t)) / m!.
double xi_density(const PropagationEnvironment& env, int m, double t);

}  // namespace cellcov
