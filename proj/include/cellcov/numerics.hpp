// numerics.hpp - shared numerical kernel: Gaussian tail, adaptive quadrature
// on finite and semi-infinite intervals, counter-based random streams, dB
// conversions.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace cellcov {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Unit conversions. All internal arithmetic is in linear units (mW, meters);
// dB and dBm appear only at configuration boundaries.
// ---------------------------------------------------------------------------
double db_to_linear(double db);      // 10^(x/10)
double linear_to_db(double linear);  // 10*log10(x)
double dbm_to_mw(double dbm);        // 10^(x/10)
double mw_to_dbm(double mw);

// Q(x) = (1/sqrt(2*pi)) * int_x^inf exp(-u^2/2) du, the standard normal tail.
// Total on finite reals; Q(x) + Q(-x) = 1.
double q_function(double x);

// Exact binomial coefficient, n <= 62 (fits a double exactly for the n <= 20
// handover range).
double binomial_coefficient(int n, int k);

// ---------------------------------------------------------------------------
// Adaptive quadrature (globally adaptive 15-point Gauss-Kronrod bisection).
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    double abs_tol = 0.0;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error bound
    int subdivisions = 0;
    bool converged = false;
};

// Thrown when a quadrature fails to converge; carries the best estimate and
// its error bound.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult best);
    QuadratureResult best;
};

using Integrand = std::function<double(double)>;

// int_a^b f, adaptive bisection until error <= max(abs_tol, rel_tol*|result|)
// or max_subdivisions segments are in play.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureSpec& spec = {});

// int_a^inf f via the map u = a + scale*(e^{t/(1-t)} - 1), t in (0,1), then
// adaptive quadrature. The exponential stretch keeps algebraic tails u^{-p}
// (p > 1) smooth in t, so the error estimate stays honest on slow decay.
// `scale` locates the transition region of the integrand (nodes cluster
// around u ~ a + scale); pass the natural decay scale when known.
QuadratureResult integrate_semi_infinite(const Integrand& f, double a,
                                         const QuadratureSpec& spec = {},
                                         double scale = 1.0);

// Unwraps a QuadratureResult, throwing QuadratureError when not converged.
double require_converged(const QuadratureResult& r, const char* context);

// ---------------------------------------------------------------------------
// Counter-based random stream (Philox4x32-10). A (seed, stream_index) pair
// fully determines the sequence, and distinct stream indices give
// statistically independent streams, so per-work-item streams can be derived
// without any shared state.
// ---------------------------------------------------------------------------
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    // Uniform on [0,1) with 53 random bits.
    double next_uniform();
    // Exponential with rate mu (mean 1/mu), by inversion.
    double next_exponential(double mu);
    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double next_normal();
    std::uint64_t next_u64();

    // Raw keyed block function, exposed for known-answer tests.
    static void philox4x32_10(const std::uint32_t counter[4],
                              const std::uint32_t key[2],
                              std::uint32_t out[4]);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::uint64_t block_ = 0;
    std::uint32_t buffer_[4] = {0, 0, 0, 0};
    int buffered_ = 0;  // unread 32-bit words left in buffer_
};

}  // namespace cellcov
