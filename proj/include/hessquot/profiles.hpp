#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hessquot/common.hpp"
#include "hessquot/symmetric_kernel.hpp"

namespace hq {

/// Base right-hand-side family g0(r): constant, rational decay toward a
/// positive limit, or a tabulated curve (log-linear interpolation).
struct G0Spec {
    enum class Kind { Constant, Rational, Tabulated };
    Kind kind = Kind::Constant;
    double value = 1.0;                       // Constant
    double limit = 1.0, amp = 0.0, power = 1; // Rational: limit + amp*(1+r)^-power
    std::vector<std::pair<double, double>> table;  // Tabulated (r, g0)

    static G0Spec constant(double c) {
        G0Spec s;
        s.kind = Kind::Constant;
        s.value = c;
        return s;
    }
    static G0Spec rational(double limit, double amp, double power) {
        G0Spec s;
        s.kind = Kind::Rational;
        s.limit = limit;
        s.amp = amp;
        s.power = power;
        return s;
    }
    double eval(double r) const;
};

/// Envelope pair around g0:
///   gbar(r)   = g0(r) + C1 r^-beta  (r > theta0, constant offset below),
///   gunder(r) = g0(r) - C1 r^-beta.
/// Validated at construction: gunder positive and non-decreasing, beta > 2.
class GEnvelope {
  public:
    GEnvelope(G0Spec g0, double C1, double beta, double theta0);

    double g0(double r) const { return g0_.eval(r); }
    double gbar(double r) const;
    double gunder(double r) const;

    double C1() const { return C1_; }
    double beta() const { return beta_; }
    double theta0() const { return theta0_; }
    double sup_gbar() const { return sup_gbar_; }
    double inf_gunder() const { return inf_gunder_; }
    /// True when gbar is non-increasing on [1, +inf). Exactly then the
    /// pointwise sandwich gbar^{1/(k-l)} <= h is an invariant region of the
    /// subsolution ODE; otherwise only the running-infimum bound holds.
    bool gbar_nonincreasing() const { return gbar_nonincreasing_; }

  private:
    G0Spec g0_;
    double C1_, beta_, theta0_;
    double sup_gbar_, inf_gunder_;
    bool gbar_nonincreasing_ = true;
};

inline GEnvelope envelope_build(G0Spec g0, double C1, double beta,
                                double theta0) {
    return GEnvelope(std::move(g0), C1, beta, theta0);
}

/// Orders plus the directional bounds that drive the profile ODEs.
struct ProfileParams {
    int k, l;
    double t_upper_k;  // t-bar_k(a)
    double t_lower_l;  // t-underbar_l(a)

    double ratio() const { return t_lower_l / t_upper_k; }
    /// The decay exponent K = (k-l)/(t-bar_k - t-underbar_l).
    double K() const { return double(k - l) / (t_upper_k - t_lower_l); }
};

ProfileParams profile_params(const Spectrum& a, int k, int l);

struct SampledProfile {
    enum class Kind { Subsolution, Supersolution, Reference };
    Kind kind;
    double param;  // delta, tau, or 0 for h0
    std::vector<double> r, v, dv;

    double value_at(double rr) const;
    double deriv_at(double rr) const;
};

/// Decreasing profile h(r, delta) of the gbar-driven ODE, h(1) = delta.
/// Requires delta > sup gbar^{1/(k-l)}.
SampledProfile integrate_h(double delta, const GEnvelope& env,
                           const ProfileParams& pp, double r_max,
                           int n_nodes = 800);

/// Increasing profile H(r, tau) of the gunder-driven ODE, H(1) = tau.
/// Requires tau^{k-l} strictly inside (ratio * gunder(1), gunder(1)).
SampledProfile integrate_H(double tau, const GEnvelope& env,
                           const ProfileParams& pp, double r_max,
                           int n_nodes = 800);

/// Reference profile h0 by Picard iteration of the integral fixed point,
/// on (r_min, r_max]. The segment (0, r_min] is folded into the integral
/// analytically (g0 frozen at its midpoint there).
SampledProfile solve_h0(const GEnvelope& env, const ProfileParams& pp,
                        double r_max, double r_min = 1e-3, int n_nodes = 1200);

/// As solve_h0, but on a caller-supplied increasing grid (used to share
/// nodes with integrate_h / integrate_H outputs).
SampledProfile solve_h0_on(const GEnvelope& env, const ProfileParams& pp,
                           const std::vector<double>& grid);

/// Fixed-point residual max_i |h0(r_i) - RHS[h0](r_i)| (diagnostic).
double h0_fixed_point_residual(const SampledProfile& h0, const GEnvelope& env,
                               const ProfileParams& pp);

}  // namespace hq
