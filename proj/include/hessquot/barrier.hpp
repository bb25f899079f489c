#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hessquot/common.hpp"
#include "hessquot/profiles.hpp"
#include "hessquot/symmetric_kernel.hpp"

namespace hq {

/// Boundary data phi(x) = c0 + (q/2)|x|^2 (constant or quadratic).
struct BoundaryData {
    double c0 = 0.0;
    double q = 0.0;
    double operator()(std::span<const double> x) const {
        double n2 = 0.0;
        for (double xi : x) n2 += xi * xi;
        return c0 + 0.5 * q * n2;
    }
};

/// Outcome of one sampled verification; worst_margin is oriented so that
/// pass <=> worst_margin >= -tolerance.
struct CheckReport {
    std::string check;
    int n_points = 0;
    double worst_margin = kInf;
    std::vector<double> location;
    double tolerance = 0.0;
    bool pass = false;
};

/// Geometry + constants for the barrier constructions. The domain Omega is
/// the A-ellipsoid E_{r_omega} with E_1 inside Omega inside E_{r0} inside
/// E_{R0}. Construction is refused unless (k-l)/(t_up_k - t_lo_l) > 2 and
/// the curvature scale Xi dominates sup gbar.
struct BarrierSpec {
    Spectrum A;
    int k, l;
    double eta;           // anchor radius for stand-alone profile barriers
    double beta1, beta2;  // anchor constants for stand-alone builds
    double delta, tau;    // default profile parameters
    double r_omega, r0, R0;
    BoundaryData phi;
    double Xi;
    ProfileParams pp;  // derived from A

    BarrierSpec(Spectrum A_, int k_, int l_, double eta_, double beta1_,
                double beta2_, double delta_, double tau_, double r_omega_,
                double r0_, double R0_, BoundaryData phi_, double Xi_,
                const GEnvelope& env);
};

/// Generalized-radial barrier W(x) = anchor + int_{eta}^{r_A(x)} theta f(theta).
/// The Hessian spectrum at x is that of f(r) A + (f'(r)/r)(Ax)(Ax)^T,
/// evaluated through the rank-one sigma identity.
class BarrierFn {
  public:
    BarrierFn(Spectrum a, SampledProfile prof, double anchor, double eta);

    double radius(std::span<const double> x) const;  // r_A(x)
    double value(std::span<const double> x) const;
    double w_of_r(double r) const;
    double sigma_of_hessian(std::span<const double> x, int j) const;
    double quotient(std::span<const double> x, int k, int l) const;

    const SampledProfile& profile() const { return prof_; }
    const Spectrum& spectrum() const { return a_; }
    double anchor() const { return anchor_; }
    double eta() const { return eta_; }

  private:
    double cum_at(double r) const;  // int_{r.front()}^{r} theta f
    Spectrum a_;
    SampledProfile prof_;
    double anchor_, eta_, cum_eta_;
    std::vector<double> cum_;
};

struct BarrierBuild {
    BarrierFn fn;
    std::vector<CheckReport> reports;
    bool pass() const;
};

/// Subsolution W from an integrate_h profile; sampled checks of k-convexity
/// (sigma_j >= -1e-10 scaled, j <= k) and S_k/S_l >= gbar - 1e-8.
BarrierBuild build_subsolution(const BarrierSpec& spec, const GEnvelope& env,
                               const SampledProfile& h, Rng& rng,
                               int n_points = 1000, double tol_scale = 1.0);

/// Supersolution Psi from an integrate_H profile; S_k/S_l <= gunder + 1e-8.
BarrierBuild build_supersolution(const BarrierSpec& spec, const GEnvelope& env,
                                 const SampledProfile& H, Rng& rng,
                                 int n_points = 1000, double tol_scale = 1.0);

struct AsymptoticConstant {
    double value;
    double tail;           // extrapolated contribution beyond the grid
    double tail_exponent;  // fitted decay power of theta (f - h0)
    double tail_error;
};

/// anchor - int_0^eta theta h0 + int_eta^inf theta (f - h0), the constant
/// mu_{anchor,eta}(delta) (f = h) or nu_{anchor}(tau) (f = H, eta = 1).
/// eta must be a node of both grids; shared nodes of f and h0 are matched
/// exactly, others interpolated.
AsymptoticConstant asymptotic_constant(const SampledProfile& f,
                                       const SampledProfile& h0, double anchor,
                                       double eta);

/// Full exterior-envelope pipeline: quadratic boundary barriers rho_xi, the
/// constants zeta1 / delta_hat / c_hat / c_tilde, mu(delta) and its inverse
/// delta(c), and the sub/supersolution envelope pair.
class BarrierAssembly {
  public:
    BarrierAssembly(BarrierSpec spec, GEnvelope env, double r_max = 2000.0,
                    int n_nodes = 900, std::uint64_t seed = 0,
                    int n_points = 1000);

    const BarrierSpec& spec() const { return spec_; }
    const GEnvelope& env() const { return env_; }
    const SampledProfile& h0() const { return h0_; }
    const SampledProfile& Hprof() const { return H_; }

    double zeta1() const { return zeta1_; }
    double delta_hat() const { return delta_hat_; }
    double c_hat() const { return c_hat_; }
    double c_tilde() const { return c_tilde_; }

    /// mu_{zeta1, r0}(delta): far-field constant of W_delta.
    double mu(double delta) const;

    /// Inverse of mu by bisection to 1e-8; throws below_threshold when
    /// c <= c_tilde.
    double solve_delta_for_c(double c) const;

    /// Quadratic barrier rho_xi and its searched center xbar(xi).
    std::vector<double> xbar(std::span<const double> xi) const;
    double rho_xi(std::span<const double> xi, std::span<const double> x) const;
    CheckReport verify_quadratic_barrier(std::span<const double> xi,
                                         int n_points);

    /// Barrier envelope phi_hat(x) = max over cached boundary points xi.
    double phi_hat(std::span<const double> x) const;

    struct EnvelopePair {
        double c, delta, zeta2;
        std::function<double(const std::vector<double>&)> lower, upper;
        std::vector<CheckReport> reports;
        bool pass() const;
    };

    EnvelopePair assemble(double c);

    /// Boundary point of the A-sphere of radius rho in direction d.
    std::vector<double> on_sphere(std::span<const double> d, double rho) const;
    std::vector<double> random_direction();

  private:
    BarrierSpec spec_;
    GEnvelope env_;
    double r_max_;
    int n_nodes_, n_points_;
    Rng rng_;
    SampledProfile h0_, H_;
    std::vector<std::vector<double>> xi_cache_;  // sampled boundary points
    std::vector<std::vector<double>> xbar_cache_;
    double zeta1_, delta_hat_, c_hat_, c_tilde_;
};

struct ObstructionReport {
    double max_residual;              // normalized worst cross-axis residual
    std::vector<double> per_axis;     // residual per axis i >= 2
    std::vector<double> homotopy;     // residuals along A(t): isotropic -> A
    bool isotropic;
};

/// Proposition-style obstruction test: fit the generalized-radial profile J
/// along axis 1 and measure the equation residual along the other axes.
/// Requires 1 <= l < k <= n-1 and A in A_{k,l}.
ObstructionReport obstruction_check(const Spectrum& A, const GEnvelope& env,
                                    int k, int l, double r_max = 10.0,
                                    int n_nodes = 200);

}  // namespace hq
