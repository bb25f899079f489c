#include "hessquot/radial_engine.hpp"

#include <cmath>
#include <string>

#include "hessquot/quadrature.hpp"
#include "hessquot/rootfind.hpp"
#include "hessquot/symmetric_kernel.hpp"

namespace hq {

HqParams::HqParams(int n_, int k_, int l_, int m_) : n(n_), k(k_), l(l_), m(m_) {
    if (n < 2) throw std::invalid_argument("HqParams: n >= 2 required");
    if (!(0 <= l && l < k && k <= m && m <= n))
        throw std::invalid_argument("HqParams: need 0 <= l < k <= m <= n");
    cnk = binom(n, k);
    cnl = binom(n, l);
    a_hat = std::pow(cnl / cnk, 1.0 / double(k - l));
    gamma_star =
        (l == 0) ? 0.0
                 : std::pow(double(l) * cnl / (double(k) * cnk),
                            1.0 / double(k - l));
    gamma_m = (m > k) ? std::pow(double(m - l) * cnl / (double(m - k) * cnk),
                                 1.0 / double(k - l))
                      : kInf;
}

double alpha_of_gamma(double r, double gamma, const HqParams& p) {
    if (!(gamma >= 0.0)) throw std::domain_error("alpha_of_gamma: gamma < 0");
    return ipow(r, p.n) * (p.cnk * ipow(gamma, p.k) - p.cnl * ipow(gamma, p.l));
}

double solve_U(double r, double alpha, const HqParams& p) {
    if (!(r > 0.0)) throw std::domain_error("solve_U: r must be positive");
    const double rhs = alpha / (p.cnk * ipow(r, p.n));
    const double ratio = p.cnl / p.cnk;
    auto F = [&](double U) { return ipow(U, p.k) - ratio * ipow(U, p.l) - rhs; };
    auto dF = [&](double U) {
        return double(p.k) * ipow(U, p.k - 1) -
               double(p.l) * ratio * ipow(U, p.l - 1);
    };
    const double lo = p.gamma_star;
    const double flo = F(lo);
    const double ftol = 1e-14 * (1.0 + std::abs(rhs) + ipow(p.a_hat, p.k));
    if (flo > ftol)
        throw hypothesis_error("solve_U: alpha below admissible range at r=" +
                               std::to_string(r));
    if (std::abs(flo) <= ftol && F(lo + 1e-9 * (1.0 + lo)) >= 0.0)
        return lo;  // boundary case: the root sits at gamma_star itself
    double hi = std::max(p.a_hat, 2.0) *
                std::pow(1.0 + std::abs(alpha), 1.0 / double(p.k));
    int guard = 0;
    while (F(hi) <= 0.0) {
        hi *= 2.0;
        if (++guard > 200)
            throw numeric_error("solve_U: bracket expansion failed");
    }
    double U = newton_bisect(F, dF, lo, hi, 1e-15);
    // one polishing step
    const double d = dF(U);
    if (d != 0.0) {
        double Un = U - F(U) / d;
        if (Un > lo) U = Un;
    }
    return U;
}

Thresholds thresholds(const HqParams& p) {
    if (p.n < 3 || p.k < 2)
        throw hypothesis_error("thresholds: requires n >= 3 and k >= 2");
    // Both extrema are r -> 1+ limits: alpha_of_gamma(r, g) = r^n * const with
    // a sign-definite constant (negative at gamma_star, positive at gamma_m).
    const double a1 = alpha_of_gamma(1.0, p.gamma_star, p);
    double a2 = kInf;
    if (p.gamma_m_finite()) a2 = alpha_of_gamma(1.0, p.gamma_m, p);
    // cross-check against a grid sup/inf over r in (1, 100]
    double grid_sup = -kInf, grid_inf = kInf;
    for (double r : log_grid(1.0 + 1e-12, 100.0, 200)) {
        grid_sup = std::max(grid_sup, alpha_of_gamma(r, p.gamma_star, p));
        if (p.gamma_m_finite())
            grid_inf = std::min(grid_inf, alpha_of_gamma(r, p.gamma_m, p));
    }
    const double tol1 = 1e-10 * (1.0 + std::abs(a1));
    if (grid_sup > a1 + tol1 || grid_sup < a1 - 1e-6 * (1.0 + std::abs(a1)))
        throw numeric_error("thresholds: grid sup disagrees with limit value");
    if (p.gamma_m_finite()) {
        const double tol2 = 1e-10 * (1.0 + std::abs(a2));
        if (grid_inf < a2 - tol2 || grid_inf > a2 + 1e-6 * (1.0 + std::abs(a2)))
            throw numeric_error("thresholds: grid inf disagrees with limit value");
    }
    return {a1, a2, p.gamma_m_finite()};
}

double mu_of_alpha(double alpha, double b, const HqParams& p, double tol) {
    if (p.n < 3)
        throw hypothesis_error("mu_of_alpha: n = 2 is routed to dim2_solution");
    const double a1 = alpha_of_gamma(1.0, p.gamma_star, p);
    if (alpha < a1 - 1e-12 * (1.0 + std::abs(a1)))
        throw hypothesis_error("mu_of_alpha: alpha below alpha1");
    if (alpha == 0.0) return b - 0.5 * p.a_hat;  // integrand vanishes identically

    auto f = [&](double s) { return s * (solve_U(s, alpha, p) - p.a_hat); };
    // The integrand is asymptotically D s^{1-n}, so the closed tail
    // f(R) R / (n-2) is exact to first order; its relative error is of the
    // order of (U(R) - a_hat)/a_hat. Grow R until that error is below tol.
    double R = 10.0;
    for (int it = 0; it < 60; ++it) {
        const double tail = std::abs(f(R)) * R / double(p.n - 2);
        const double rel = std::abs(solve_U(R, alpha, p) - p.a_hat) / p.a_hat;
        if (tail * rel < 0.5 * tol || tail < 0.5 * tol) break;
        R *= 2.0;
    }
    const double body = integrate_adaptive(f, 1.0, R, 0.5 * tol);
    const double tail = f(R) * R / double(p.n - 2);
    return b - 0.5 * p.a_hat + body + tail;
}

namespace {

__float128 ipowq(__float128 x, int e) {
    __float128 r = 1, bb = x;
    while (e > 0) {
        if (e & 1) r *= bb;
        bb *= bb;
        e >>= 1;
    }
    return r;
}

// Conserved-flux defect |C_n^k r^n U^k - C_n^l r^n U^l - alpha|, evaluated
// in extended precision: the factor r^n amplifies the last-bit rounding of
// a double root far beyond the defect of the underlying solution. A single
// Newton correction removes only that representation error -- a root that
// is genuinely off by e leaves a defect of order r^n e^2.
double flux_defect(double r, double U, double alpha, const HqParams& p) {
    const __float128 cnk = p.cnk, cnl = p.cnl, aq = alpha;
    const __float128 ratio = cnl / cnk;
    const __float128 rn = ipowq(r, p.n);
    __float128 Uq = U;
    const __float128 F =
        ipowq(Uq, p.k) - ratio * ipowq(Uq, p.l) - aq / (cnk * rn);
    const __float128 dF = __float128(p.k) * ipowq(Uq, p.k - 1) -
                          __float128(p.l) * ratio * ipowq(Uq, p.l - 1);
    if (dF != 0) Uq -= F / dF;
    const __float128 flux =
        cnk * rn * ipowq(Uq, p.k) - cnl * rn * ipowq(Uq, p.l) - aq;
    return std::abs(double(flux));
}

}  // namespace

RadialSolution radial_profile(double alpha, double b, const HqParams& p,
                              const std::vector<double>& r_grid) {
    if (r_grid.size() < 2 || std::abs(r_grid.front() - 1.0) > 1e-12)
        throw std::invalid_argument("radial_profile: grid must start at r = 1");
    RadialSolution sol{p, alpha, b, 0.0, {}, {}, {}, {}, {}, 0.0, 0.0};
    const std::size_t N = r_grid.size();
    sol.r = r_grid;
    sol.U.resize(N);
    sol.du.resize(N);
    sol.residual.resize(N);
    const double ratio = p.cnl / p.cnk;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = r_grid[i];
        const double U = solve_U(r, alpha, p);
        const double Fr = double(p.n) * alpha / (p.cnk * ipow(r, p.n + 1));
        const double FU = double(p.k) * ipow(U, p.k - 1) -
                          double(p.l) * ratio * ipow(U, p.l - 1);
        const double dU = (FU != 0.0) ? -Fr / FU : 0.0;
        const double du = r * U;
        const double u2 = U + r * dU;  // u''
        sol.U[i] = U;
        sol.du[i] = du;
        for (int j = 1; j <= p.m; ++j) {
            const double sj = radial_hessian_sigma(du, u2, r, j, p.n);
            const double scale = binom(p.n, j) * ipow(std::max(U, 1.0), j);
            if (sj <= -1e-12 * scale)
                throw cone_violation(
                    "radial_profile: sigma_" + std::to_string(j) +
                        " <= 0 at r = " + std::to_string(r) +
                        " (alpha outside the m-convex range)",
                    j);
        }
        const double sk = radial_hessian_sigma(du, u2, r, p.k, p.n);
        const double sl = radial_hessian_sigma(du, u2, r, p.l, p.n);
        sol.residual[i] = sk / sl - 1.0;
        sol.max_residual = std::max(sol.max_residual, std::abs(sol.residual[i]));
        sol.max_flux_drift =
            std::max(sol.max_flux_drift, flux_defect(r, U, alpha, p));
    }
    auto f = [&](double s) { return s * solve_U(s, alpha, p); };
    sol.u = cumulative_simpson(f, r_grid, b);
    sol.c = (p.n >= 3) ? mu_of_alpha(alpha, b, p)
                       : std::numeric_limits<double>::quiet_NaN();
    return sol;
}

double dim2_nu(double rho, double b) {
    if (rho < -1.0)
        throw hypothesis_error("dim2: no solution exists for rho < -1");
    const double s = std::sqrt(1.0 + rho);
    return b - 0.5 + 0.25 * rho + 0.5 * rho * std::log(2.0) -
           0.5 * (s + rho * std::log(1.0 + s));
}

Dim2Solution dim2_solution(double rho, double b,
                           const std::vector<double>& r_grid) {
    if (rho < -1.0)
        throw hypothesis_error("dim2: no solution exists for rho < -1");
    Dim2Solution sol;
    sol.rho = rho;
    sol.b = b;
    sol.nu = dim2_nu(rho, b);
    const double s1 = std::sqrt(1.0 + rho);
    const double c0 = b - 0.5 - 0.5 * (s1 + rho * std::log(1.0 + s1));
    sol.r = r_grid;
    const std::size_t N = r_grid.size();
    sol.u.resize(N);
    sol.du.resize(N);
    sol.residual.resize(N);
    sol.remainder.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = r_grid[i];
        const double sr = std::sqrt(r * r + rho);
        const double du = r + sr;
        const double u =
            c0 + 0.5 * r * r + 0.5 * (r * sr + rho * std::log(r + sr));
        sol.u[i] = u;
        sol.du[i] = du;
        sol.residual[i] = du * du - 2.0 * r * du - rho;
        sol.remainder[i] = u - (r * r + 0.5 * rho * std::log(r) + sol.nu);
    }
    return sol;
}

RadialSolution special_lagrangian_3d(double alpha, double b,
                                     const std::vector<double>& r_grid) {
    if (alpha < -2.0)
        throw hypothesis_error("special_lagrangian_3d: requires alpha >= -2");
    return radial_profile(alpha, b, HqParams(3, 3, 1, 3), r_grid);
}

}  // namespace hq
