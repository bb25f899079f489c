#pragma once

#include <limits>
#include <vector>

#include "hessquot/common.hpp"

namespace hq {

/// Dimension/order tuple (n, k, l, m) for S_k/S_l = 1 with m-convexity.
/// Hosts the derived constants a_hat, gamma_star, gamma_m and the binomials.
struct HqParams {
    int n, k, l, m;

    HqParams(int n_, int k_, int l_, int m_);

    double cnk;         // C(n,k)
    double cnl;         // C(n,l)
    double a_hat;       // (C_n^l / C_n^k)^{1/(k-l)}
    double gamma_star;  // (l C_n^l / (k C_n^k))^{1/(k-l)}; 0 for l = 0
    double gamma_m;     // +inf when m == k

    bool gamma_m_finite() const { return m > k; }
};

struct Thresholds {
    double alpha1;
    double alpha2;  // +inf sentinel when m == k
    bool alpha2_finite;
};

/// The unique root U in (gamma_star, inf) of
///   U^k - (C_n^l/C_n^k) U^l - alpha/(C_n^k r^n) = 0.
double solve_U(double r, double alpha, const HqParams& p);

/// Exact inverse: alpha = r^n (C_n^k gamma^k - C_n^l gamma^l).
double alpha_of_gamma(double r, double gamma, const HqParams& p);

/// alpha1 = sup_{r>1} alpha_of_gamma(r, gamma_star),
/// alpha2 = inf_{r>1} alpha_of_gamma(r, gamma_m); both attained as r -> 1+,
/// cross-checked against a grid sup/inf.
Thresholds thresholds(const HqParams& p);

/// Asymptotic constant c = mu(alpha) for boundary value b (n >= 3).
double mu_of_alpha(double alpha, double b, const HqParams& p,
                   double tol = 1e-10);

struct RadialSolution {
    HqParams params;
    double alpha;
    double b;  // u(1)
    double c;  // asymptotic constant mu(alpha)
    std::vector<double> r, u, du, U, residual;  // residual = S_k/S_l - 1
    double max_residual;
    double max_flux_drift;  // |C_n^k r^{n-k}(u')^k - C_n^l r^{n-l}(u')^l - alpha|
};

/// Radial solution profile on the given grid (grid.front() == 1).
/// Checks m-convexity at every node; throws cone_violation otherwise.
RadialSolution radial_profile(double alpha, double b, const HqParams& p,
                              const std::vector<double>& r_grid);

struct Dim2Solution {
    double rho;
    double b;
    double nu;  // asymptotic constant nu(rho)
    std::vector<double> r, u, du, residual;  // residual = (u')^2 - 2ru' - rho
    std::vector<double> remainder;           // u - (r^2 + rho/2 ln r + nu)
};

/// Closed-form n=2 special Lagrangian solution u' = r + sqrt(r^2 + rho).
/// Requires rho >= -1 (the existence threshold).
Dim2Solution dim2_solution(double rho, double b,
                           const std::vector<double>& r_grid);

/// nu(rho) closed form.
double dim2_nu(double rho, double b);

/// Special Lagrangian det D^2 u = Delta u in R^3: (n,k,l,m) = (3,3,1,3).
RadialSolution special_lagrangian_3d(double alpha, double b,
                                     const std::vector<double>& r_grid);


}  // namespace hq
