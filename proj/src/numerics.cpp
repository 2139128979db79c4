#include "cellcov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace cellcov {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double q_function(double x) {
    // Q(x) = 0.5*erfc(x/sqrt(2))
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double binomial_coefficient(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0.0;
    if (n > 62) throw std::invalid_argument("binomial_coefficient: n > 62");
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / i;
    return static_cast<double>(c);
}

QuadratureError::QuadratureError(const std::string& what, QuadratureResult b)
    : std::runtime_error(what), best(b) {}

double require_converged(const QuadratureResult& r, const char* context) {
    if (!r.converged) {
        throw QuadratureError(std::string(context) +
                                  ": quadrature did not converge (estimate " +
                                  std::to_string(r.value) + ", error bound " +
                                  std::to_string(r.error) + ")",
                              r);
    }
    return r.value;
}

namespace {

// 15-point Kronrod nodes/weights and the embedded 7-point Gauss weights
// (QUADPACK qk15 constants).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715526, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
    double a, b;
    double value;
    double error;
    std::uint64_t order;  // insertion sequence, breaks error ties
};

struct SegmentLess {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.order > y.order;
    }
};

// One 15-point Gauss-Kronrod panel with the QUADPACK error heuristic.
void gk15(const Integrand& f, double a, double b, double& value, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        fv[i] = f(center - dx);
        fv[14 - i] = f(center + dx);
    }

    double resk = kWgk[7] * fc;
    double resabs = std::abs(resk);
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    // Gauss nodes are the odd Kronrod nodes (indices 1,3,5 pairs + center).
    double resg = kWg[3] * fc;
    for (int i = 0; i < 3; ++i) {
        resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int i = 0; i < 7; ++i) {
        resasc += kWgk[i] *
                  (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    }

    value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double tiny = std::numeric_limits<double>::min();
    if (resabs > tiny / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    error = err;
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureSpec& spec) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    if (spec.abs_tol <= 0.0 && spec.rel_tol <= 0.0) {
        throw std::invalid_argument("QuadratureSpec: abs_tol and rel_tol both zero");
    }

    std::priority_queue<Segment, std::vector<Segment>, SegmentLess> heap;
    std::uint64_t order = 0;

    Segment whole{a, b, 0.0, 0.0, order++};
    gk15(f, a, b, whole.value, whole.error);
    heap.push(whole);

    double total_value = whole.value;
    double total_error = whole.error;
    int segments = 1;

    auto tolerance = [&]() {
        return std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value));
    };

    while (total_error > tolerance() && segments < spec.max_subdivisions) {
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval exhausted at double precision; put it back and stop.
            heap.push(worst);
            break;
        }
        Segment left{worst.a, mid, 0.0, 0.0, order++};
        Segment right{mid, worst.b, 0.0, 0.0, order++};
        gk15(f, left.a, left.b, left.value, left.error);
        gk15(f, right.a, right.b, right.value, right.error);

        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++segments;
    }

    // Re-sum from the heap for a numerically clean total.
    total_value = 0.0;
    total_error = 0.0;
    while (!heap.empty()) {
        total_value += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }

    out.value = total_value;
    out.error = total_error;
    out.subdivisions = segments;
    out.converged = total_error <= std::max(spec.abs_tol,
                                            spec.rel_tol * std::abs(total_value));
    return out;
}

QuadratureResult integrate_semi_infinite(const Integrand& f, double a,
                                         const QuadratureSpec& spec,
                                         double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("integrate_semi_infinite: scale must be positive");
    }
    auto g = [&f, a, scale](double t) {
        const double om = 1.0 - t;
        const double w = t / om;
        const double ew = std::expm1(w);  // e^w - 1
        const double u = a + scale * ew;
        if (!std::isfinite(u)) return 0.0;
        const double fu = f(u);
        const double jac = scale * (ew + 1.0) / (om * om);
        const double v = fu * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(g, 0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------
// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// ---------------------------------------------------------------------------
namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

void RngStream::philox4x32_10(const std::uint32_t counter[4],
                              const std::uint32_t key[2], std::uint32_t out[4]) {
    std::uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {}

void RngStream::refill() {
    const std::uint32_t counter[4] = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_index_),
        static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::uint32_t key[2] = {static_cast<std::uint32_t>(seed_),
                                  static_cast<std::uint32_t>(seed_ >> 32)};
    philox4x32_10(counter, key, buffer_);
    ++block_;
    buffered_ = 4;
}

std::uint64_t RngStream::next_u64() {
    if (buffered_ < 2) refill();
    const std::uint64_t hi = buffer_[4 - buffered_];
    const std::uint64_t lo = buffer_[5 - buffered_];
    buffered_ -= 2;
    return (hi << 32) | lo;
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_exponential(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("next_exponential: mu must be > 0");
    return -std::log1p(-next_uniform()) / mu;
}

double RngStream::next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace cellcov
