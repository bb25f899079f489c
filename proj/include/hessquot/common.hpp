#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exact binomial coefficient C(n,k) as a double; 0 outside the triangle.
inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * double(n - k + i) / double(i);
    return c;
}

/// Integer power with the sigma_0 convention: ipow(x, 0) == 1 for every x,
/// including x == 0.
inline double ipow(double x, int e) {
    if (e == 0) return 1.0;
    if (e < 0) return 1.0 / ipow(x, -e);
    double r = 1.0, b = x;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/// Geometric grid with n_nodes nodes from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n_nodes) {
    if (!(lo > 0.0) || !(hi > lo) || n_nodes < 2)
        throw std::invalid_argument("log_grid: need 0 < lo < hi and >= 2 nodes");
    std::vector<double> g(n_nodes);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n_nodes; ++i)
        g[i] = std::exp(llo + (lhi - llo) * double(i) / double(n_nodes - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// splitmix64; the single deterministic randomness source behind every
/// sampled check (seedable from the scenario config).
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal (Box-Muller)
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    std::uint64_t state_;
};

// ---- error taxonomy ------------------------------------------------------

/// Violated analytic hypothesis (delta/tau/beta ranges etc.).
struct hypothesis_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Iteration failed to converge or bracket.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sigma_j cone condition failed; carries the first failing order.
struct cone_violation : std::runtime_error {
    cone_violation(const std::string& msg, int order)
        : std::runtime_error(msg), failing_order(order) {}
    int failing_order;
};

/// Requested asymptotic constant below the attainable threshold.
struct below_threshold : std::runtime_error {
    below_threshold(const std::string& msg, double floor)
        : std::runtime_error(msg), c_floor(floor) {}
    double c_floor;
};

}  // namespace hq
