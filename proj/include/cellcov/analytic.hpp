// analytic.hpp - outage and handover probabilities of the Poisson network by
// quadrature of the coverage integrals, with closed-form fast paths when the
// plain exponent path loss model permits.
#pragma once

#include <vector>

#include "cellcov/propagation.hpp"

namespace cellcov {

// One coverage question: environment, SINR threshold T (linear), and the
// consecutive-slot count n (used by the handover probability only).
struct CoverageQuery {
    PropagationEnvironment env;
    double threshold = 1.0;
    int slots = 1;
};

// M_m = 1 + (1/2pi k) int_{-pi}^{pi} dtheta
//           int_1^inf (1 - (1/(1 + T a(theta) u^{-gamma/2}))^m) du.
// M := M_1. (M_m - 1) scales as 1/k by construction.
double m_m_constant(int reuse_k, double threshold, double gamma,
                    const BeamPattern& beam, int m);

// Exponent-model constants of the reduced outage/handover integrals:
// p_o = 1 - int_0^inf exp(-M alpha - G alpha^{gamma/2}) dalpha,
// G = N T mu (lambda_B C)^{-gamma/2}. m_m holds M_1..M_n.
struct AnalyticConstants {
    double c = 0.0;
    double g = 0.0;
    std::vector<double> m_m;
};
AnalyticConstants analytic_constants(const CoverageQuery& query);

// D_m(beta) = int_{-pi}^{pi} dtheta int_beta^inf B'(xi)
//             (1 - (1/(1 + T beta a(theta)/xi))^m) dxi,
// the interference exponent of the m-slot joint coverage. D(beta) = D_1(beta).
double d_m_of(const PropagationEnvironment& env, double beta, double threshold,
              int m);
double d_of(const PropagationEnvironment& env, double beta, double threshold);

// P(SINR >= T | xi_0 = beta) = exp(-N T mu beta - (lambda_B/2pi k) D(beta)).
double coverage_given_xi0(const PropagationEnvironment& env, double beta,
                          double threshold);

// Outage probability with automatic dispatch:
//   exponent, N = 0: 1 - 1/M
//   exponent, N > 0: single quadrature of exp(-M alpha - G alpha^{gamma/2})
//   modified + lognormal: full coverage quadrature
// The modified model with degenerate shadowing is rejected: its point process
// has an atom, outside the assumptions the coverage integral is derived under.
double outage_probability(const CoverageQuery& query);

// The full quadrature route, with D evaluated by nested quadrature and no
// closed-form shortcuts; kept independent so the fast paths can be checked
// against it.
double outage_probability_quadrature(const CoverageQuery& query);

// The reduced exponent-model quadrature int_0^inf e^{-M a - G a^{gamma/2}} da
// evaluated directly (valid for any N >= 0).
double outage_exponent_reduced(const CoverageQuery& query);

// gamma = 4 with noise: p_o = 1 - (1/2) sqrt(pi/G) e^{M^2/4G} erfc(M/(2 sqrt G)),
// evaluated in overflow-safe scaled form.
double outage_exponent_gamma4_closed(const CoverageQuery& query);

// q_m: probability the mobile is covered in each of m slots of one snapshot.
// q_1 = 1 - p_o. Dispatch mirrors outage_probability; the slot count enters
// the noise term as exp(-m N T mu beta).
double q_m(const CoverageQuery& query, int m);
double q_m_quadrature(const CoverageQuery& query, int m);

// p_ho = 1 + sum_{m=1}^n (-1)^m binom(n,m) q_m, the probability of outage in
// n consecutive slots. n is capped at 20: the alternating sum loses precision
// beyond that, and scenario slot counts are single digits.
double handover_probability(const CoverageQuery& query);

}  // namespace cellcov
