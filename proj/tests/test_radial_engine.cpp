#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hessquot/asymptotics.hpp"
#include "hessquot/radial_engine.hpp"

using namespace hq;

TEST_CASE("solve_U inverts alpha_of_gamma") {
    Rng rng(21);
    for (const auto [n, k, l, m] : {std::array<int, 4>{3, 2, 0, 3},
                                    {4, 2, 1, 3},
                                    {3, 3, 1, 3},
                                    {5, 3, 1, 4}}) {
        HqParams p(n, k, l, m);
        for (int trial = 0; trial < 50; ++trial) {
            const double r = rng.uniform(1.0, 50.0);
            const double gamma = rng.uniform(p.gamma_star + 0.05, 4.0);
            const double alpha = alpha_of_gamma(r, gamma, p);
            CHECK(solve_U(r, alpha, p) ==
                  doctest::Approx(gamma).epsilon(1e-12));
        }
        // alpha = 0 root is a_hat at every radius
        for (double r : {1.0, 3.0, 100.0})
            CHECK(solve_U(r, 0.0, p) ==
                  doctest::Approx(p.a_hat).epsilon(1e-13));
    }
}

TEST_CASE("solve_U rejects alpha below the admissible floor") {
    HqParams p(3, 2, 1, 3);
    const double a1 = alpha_of_gamma(1.0, p.gamma_star, p);
    CHECK_THROWS_AS((void)solve_U(1.0, a1 - 0.1, p), hypothesis_error);
}

TEST_CASE("thresholds: l = 0 closed forms") {
    for (const auto [k, m, n] :
         {std::array<int, 3>{2, 3, 3}, {2, 3, 4}, {3, 4, 5}}) {
        HqParams p(n, k, 0, m);
        const Thresholds th = thresholds(p);
        CHECK(th.alpha1 == doctest::Approx(-1.0).epsilon(1e-10));
        REQUIRE(th.alpha2_finite);
        CHECK(th.alpha2 ==
              doctest::Approx(double(k) / double(m - k)).epsilon(1e-10));
    }
}

TEST_CASE("thresholds: special Lagrangian (3,3,1,3)") {
    HqParams p(3, 3, 1, 3);
    const Thresholds th = thresholds(p);
    CHECK(th.alpha1 == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK_FALSE(th.alpha2_finite);
    CHECK(p.a_hat == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("mu: exact value at alpha = 0 and strict monotonicity") {
    Rng rng(22);
    for (const auto [n, k, l, m] :
         {std::array<int, 4>{3, 2, 0, 3}, {4, 2, 1, 3}, {3, 3, 1, 3}}) {
        HqParams p(n, k, l, m);
        const double b = 1.25;
        CHECK(mu_of_alpha(0.0, b, p) ==
              doctest::Approx(b - 0.5 * p.a_hat).epsilon(1e-12));
        const Thresholds th = thresholds(p);
        const double lo = th.alpha1 * 0.9;
        const double hi = th.alpha2_finite ? th.alpha2 * 0.9 : 5.0;
        for (int trial = 0; trial < 20; ++trial) {
            double a1 = rng.uniform(lo, hi), a2 = rng.uniform(lo, hi);
            if (a1 == a2) continue;
            if (a1 > a2) std::swap(a1, a2);
            CHECK(mu_of_alpha(a1, b, p) < mu_of_alpha(a2, b, p));
        }
    }
}

TEST_CASE("radial_profile: residual, flux drift and monotone data") {
    Rng rng(23);
    // (k, l, m, n) triples with 5 random admissible alpha each
    for (const auto [k, l, m, n] :
         {std::array<int, 4>{2, 0, 2, 3}, {2, 1, 3, 4}, {3, 1, 3, 3}}) {
        HqParams p(n, k, l, m);
        const Thresholds th = thresholds(p);
        const double lo = th.alpha1 * 0.9;
        const double hi = th.alpha2_finite ? th.alpha2 * 0.9 : 4.0;
        const auto grid = log_grid(1.0, 1e3, 2000);
        for (int trial = 0; trial < 5; ++trial) {
            const double alpha = rng.uniform(lo, hi);
            const RadialSolution sol = radial_profile(alpha, 1.0, p, grid);
            CHECK(sol.max_residual <= 1e-8);
            CHECK(sol.max_flux_drift <= 1e-9);
            CHECK(sol.u.front() == doctest::Approx(1.0));
            // u' = r U > 0 and u increasing
            for (std::size_t i = 1; i < sol.r.size(); ++i) {
                CHECK(sol.du[i] > 0.0);
                CHECK(sol.u[i] > sol.u[i - 1]);
            }
        }
    }
}

TEST_CASE("radial_profile: m-convexity violation is detected") {
    // (2,0,3,3): alpha above alpha2 breaks sigma_3 >= 0
    HqParams p(3, 2, 0, 3);
    const Thresholds th = thresholds(p);
    REQUIRE(th.alpha2_finite);
    CHECK_THROWS_AS((void)radial_profile(th.alpha2 * 1.5, 1.0, p,
                                         log_grid(1.0, 10.0, 50)),
                    cone_violation);
    try {
        (void)radial_profile(th.alpha2 * 1.5, 1.0, p, log_grid(1.0, 10.0, 50));
    } catch (const cone_violation& e) {
        CHECK(e.failing_order == 3);
    }
}

TEST_CASE("dim2: closed-form identities") {
    const double b = 2.0;
    CHECK(dim2_nu(0.0, b) == b - 1.0);  // exact
    // monotone up on [-1, 0], down on [0, 10], 100-point grids
    double prev = dim2_nu(-1.0, b);
    for (int i = 1; i < 100; ++i) {
        const double rho = -1.0 + double(i) / 99.0;
        const double v = dim2_nu(rho, b);
        CHECK(v >= prev);
        prev = v;
    }
    prev = dim2_nu(0.0, b);
    for (int i = 1; i < 100; ++i) {
        const double rho = 10.0 * double(i) / 99.0;
        const double v = dim2_nu(rho, b);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK_THROWS_AS((void)dim2_nu(-1.5, b), hypothesis_error);
}

TEST_CASE("dim2: profile satisfies the quadratic exactly; remainder ~ r^-2") {
    const auto grid = log_grid(1.0, 4000.0, 1500);
    const Dim2Solution sol = dim2_solution(0.7, 1.0, grid);
    // scale by (u')^2: the quadratic loses relative precision at large r
    for (std::size_t i = 0; i < sol.residual.size(); ++i)
        CHECK(std::abs(sol.residual[i]) <
              1e-13 * (1.0 + sol.du[i] * sol.du[i]));
    CHECK(sol.u.front() == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> e(sol.remainder.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = sol.remainder[i];
    const DecayFit fit = fit_decay(sol.r, e, 50.0, 2000.0);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.075));
}

TEST_CASE("special Lagrangian wrapper matches (3,3,1,3) and its floor") {
    const auto grid = log_grid(1.0, 100.0, 300);
    const RadialSolution sol = special_lagrangian_3d(0.5, 1.0, grid);
    CHECK(sol.params.n == 3);
    CHECK(sol.params.k == 3);
    CHECK(sol.params.l == 1);
    CHECK(sol.max_residual <= 1e-8);
    CHECK_THROWS_AS((void)special_lagrangian_3d(-2.5, 1.0, grid),
                    hypothesis_error);
}
