#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <vector>

#include "hessquot/barrier.hpp"
#include "hessquot/profiles.hpp"
#include "hessquot/symmetric_kernel.hpp"

using namespace hq;

namespace {

Spectrum aniso3() {  // sigma_2 = sigma_1, n = 3
    return Spectrum({0.99, 0.99, 1.0203061224489796});
}

Spectrum aniso4() {  // sigma_3 = sigma_1, n = 4, decay exponent K ~ 3.85
    return Spectrum({0.98, 0.98, 0.98, 1.0625175419944717});
}

GEnvelope make_env() {
    return envelope_build(G0Spec::constant(1.0), 0.1, 3.0, 5.0);
}

BarrierSpec make_spec(const Spectrum& A, int k, int l, const GEnvelope& env) {
    const ProfileParams pp = profile_params(A, k, l);
    const double inv = 1.0 / double(k - l);
    const double sup_root = std::pow(env.sup_gbar(), inv);
    const double delta = std::max(1.5 * sup_root, sup_root + 0.5);
    const double g1 = env.gunder(1.0);
    // keep tau^{k-l} safely inside the upper half of (ratio g1, g1)
    const double tau = std::pow(0.7 * g1 + 0.3 * pp.ratio() * g1, inv);
    const double Xi =
        1.1 * std::pow(std::max(env.sup_gbar() * binom(A.n(), l) /
                                    binom(A.n(), k),
                                env.sup_gbar()),
                       inv);
    return BarrierSpec(A, k, l, 1.0, 0.0, 0.0, delta, tau, 2.0, 3.0, 6.0,
                       BoundaryData{1.0, 0.0}, Xi, env);
}

double brute_sigma(const std::vector<double>& a, int j) {
    const int n = int(a.size());
    if (j == 0) return 1.0;
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(unsigned(mask)) != j) continue;
        double p = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) p *= a[std::size_t(i)];
        total += p;
    }
    return total;
}

}  // namespace

TEST_CASE("BarrierSpec rejects broken geometry and constants") {
    const GEnvelope env = make_env();
    const Spectrum A = aniso3();
    auto mk = [&](double r_omega, double r0, double R0, double eta,
                  double Xi) {
        return BarrierSpec(A, 2, 1, eta, 0.0, 0.0, 2.0, 0.9, r_omega, r0, R0,
                           BoundaryData{1.0, 0.0}, Xi, env);
    };
    CHECK_NOTHROW(mk(2.0, 3.0, 6.0, 1.0, 1.5));
    CHECK_THROWS_AS(mk(0.9, 3.0, 6.0, 1.0, 1.5), hypothesis_error);
    CHECK_THROWS_AS(mk(3.0, 2.0, 6.0, 1.0, 1.5), hypothesis_error);
    CHECK_THROWS_AS(mk(2.0, 3.0, 2.5, 1.0, 1.5), hypothesis_error);
    CHECK_THROWS_AS(mk(2.0, 3.0, 6.0, 0.5, 1.5), hypothesis_error);
    // Xi^{k-l} must dominate sup gbar * max(1, C_n^l / C_n^k) = 1.0008
    CHECK_THROWS_AS(mk(2.0, 3.0, 6.0, 1.0, 0.9), hypothesis_error);
    // spectrum must satisfy sigma_k = sigma_l
    CHECK_THROWS_AS(BarrierSpec(Spectrum({1.0, 2.0, 3.0}), 2, 1, 1.0, 0.0,
                                0.0, 2.0, 0.9, 2.0, 3.0, 6.0,
                                BoundaryData{1.0, 0.0}, 1.5, env),
                    hypothesis_error);
}

TEST_CASE("one-sided barriers: quotient and convexity margins") {
    const auto t0 = std::chrono::steady_clock::now();
    const GEnvelope env = make_env();
    const BarrierSpec spec = make_spec(aniso3(), 2, 1, env);
    Rng rng(7);
    const SampledProfile h = integrate_h(spec.delta, env, spec.pp, 2e3);
    const SampledProfile H = integrate_H(spec.tau, env, spec.pp, 2e3);

    const BarrierBuild sub = build_subsolution(spec, env, h, rng, 1000);
    REQUIRE(sub.reports.size() == 2);
    for (const auto& rep : sub.reports) {
        CHECK(rep.pass);
        CHECK(rep.n_points == 1000);
    }
    // oriented margins: S_k/S_l - gbar >= -1e-8, scaled sigma_j >= -1e-10
    CHECK(sub.reports[0].worst_margin >= -1e-8);
    CHECK(sub.reports[1].worst_margin >= -1e-10);

    const BarrierBuild sup = build_supersolution(spec, env, H, rng, 1000);
    REQUIRE(sup.reports.size() == 2);
    for (const auto& rep : sup.reports) CHECK(rep.pass);
    // oriented the other way: gunder - S_k/S_l >= -1e-8
    CHECK(sup.reports[0].worst_margin >= -1e-8);

    // profile kinds are enforced
    CHECK_THROWS_AS((void)build_subsolution(spec, env, H, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)build_supersolution(spec, env, h, rng),
                    std::invalid_argument);

    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    CHECK(secs < 30.0);
}

TEST_CASE("BarrierFn: radius, anchored value, and the Hessian oracle") {
    const GEnvelope env = make_env();
    const BarrierSpec spec = make_spec(aniso3(), 2, 1, env);
    const SampledProfile h = integrate_h(spec.delta, env, spec.pp, 2e3);
    BarrierFn fn(spec.A, h, 4.0, spec.eta);

    // r_A(x)^2 = sum a_i x_i^2
    const std::vector<double> x0{1.0, -2.0, 0.5};
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) r2 += spec.A[i] * x0[i] * x0[i];
    CHECK(fn.radius(x0) == doctest::Approx(std::sqrt(r2)).epsilon(1e-14));

    // value is the anchored radial integral: W = anchor at r = eta, and
    // increasing in r since h > 0
    CHECK(fn.w_of_r(spec.eta) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(fn.w_of_r(5.0) > fn.w_of_r(2.0));
    std::vector<double> xe = x0;
    for (double& v : xe) v *= spec.eta / fn.radius(x0);
    CHECK(fn.value(xe) == doctest::Approx(4.0).epsilon(1e-12));

    // sigma_of_hessian vs eigenvalues of f A + (f'/r)(Ax)(Ax)^T
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> x(3);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        const double r = fn.radius(x);
        if (r < spec.eta || r > 1e3) continue;
        const double f = h.value_at(r), fp = h.deriv_at(r);
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        for (int i = 0; i < 3; ++i) M(i, i) = f * spec.A[i];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                M(i, j) += (fp / r) * spec.A[i] * x[std::size_t(i)] *
                           spec.A[j] * x[std::size_t(j)];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
        std::vector<double> lam(es.eigenvalues().data(),
                                es.eigenvalues().data() + 3);
        for (int j = 1; j <= 3; ++j)
            CHECK(fn.sigma_of_hessian(x, j) ==
                  doctest::Approx(brute_sigma(lam, j)).epsilon(1e-9));
    }
}

TEST_CASE("assembly: mu is monotone and inverts; threshold is enforced") {
    const GEnvelope env = make_env();
    const BarrierSpec spec = make_spec(aniso4(), 3, 1, env);
    BarrierAssembly asm_(spec, env, 2e3, 900, 5, 400);

    CHECK(asm_.delta_hat() >
          std::pow(env.sup_gbar(), 1.0 / double(spec.k - spec.l)));
    CHECK(asm_.c_tilde() >= asm_.c_hat() - 1e-12);
    CHECK(asm_.c_tilde() >= asm_.mu(asm_.delta_hat()) - 1e-12);

    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        double d1 = asm_.delta_hat() + rng.uniform(0.0, 3.0);
        double d2 = asm_.delta_hat() + rng.uniform(0.0, 3.0);
        if (d1 == d2) continue;
        if (d1 > d2) std::swap(d1, d2);
        CHECK(asm_.mu(d1) < asm_.mu(d2));
    }

    for (double c : {asm_.c_tilde() + 0.5, asm_.c_tilde() + 2.0}) {
        const double d = asm_.solve_delta_for_c(c);
        CHECK(std::abs(asm_.mu(d) - c) <= 1e-8);
    }
    CHECK_THROWS_AS((void)asm_.solve_delta_for_c(asm_.c_tilde()),
                    below_threshold);
    try {
        (void)asm_.solve_delta_for_c(asm_.c_tilde() - 1.0);
    } catch (const below_threshold& e) {
        CHECK(e.c_floor == doctest::Approx(asm_.c_tilde()).epsilon(1e-12));
    }
}

TEST_CASE("assembly: quadratic boundary barrier and the envelope pair") {
    const GEnvelope env = make_env();
    const BarrierSpec spec = make_spec(aniso4(), 3, 1, env);
    BarrierAssembly asm_(spec, env, 2e3, 900, 5, 400);

    const auto xi = asm_.on_sphere(asm_.random_direction(), spec.r_omega);
    const CheckReport quad = asm_.verify_quadratic_barrier(xi, 400);
    CHECK(quad.pass);
    // rho_xi touches phi at xi itself
    CHECK(asm_.rho_xi(xi, xi) == doctest::Approx(spec.phi(xi)).epsilon(1e-12));
    // phi_hat is a max of boundary barriers, each below phi on the boundary
    Rng brng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const auto x = asm_.on_sphere(asm_.random_direction(), spec.r_omega);
        CHECK(asm_.phi_hat(x) <= spec.phi(x) + 1e-9);
    }

    const double c = asm_.c_tilde() + 1.0 + 0.1 * std::abs(asm_.c_tilde());
    auto pair = asm_.assemble(c);
    CHECK(pair.c == doctest::Approx(c));
    CHECK(pair.pass());
    REQUIRE(!pair.reports.empty());
    for (const auto& rep : pair.reports) CHECK(rep.pass);

    // spot-check the ordering of the assembled envelopes
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const double rho = spec.r_omega * std::pow(10.0, rng.uniform(0.0, 2.5));
        const auto x = asm_.on_sphere(asm_.random_direction(), rho);
        CHECK(pair.lower(x) <= pair.upper(x) + 1e-8);
    }
    // shared far-field constant: the gap closes by r = 1e3
    const auto xf = asm_.on_sphere(asm_.random_direction(), 1e3);
    CHECK(std::abs(pair.lower(xf) - pair.upper(xf)) < 1e-2);
}

TEST_CASE("obstruction: isotropic spectra pass, anisotropic ones fail") {
    const GEnvelope env = make_env();
    const ObstructionReport iso =
        obstruction_check(Spectrum::isotropic(3, 2, 1), env, 2, 1);
    CHECK(iso.isotropic);
    CHECK(iso.max_residual < 1e-10);

    const ObstructionReport ani = obstruction_check(aniso3(), env, 2, 1);
    CHECK_FALSE(ani.isotropic);
    CHECK(ani.max_residual > 1e-6);
    REQUIRE(ani.homotopy.size() == 5);
    CHECK(ani.homotopy.front() < 1e-10);  // t = 0 is the isotropic end
    CHECK(ani.homotopy.back() > 1e-6);    // t = 1 reproduces A

    CHECK_THROWS_AS((void)obstruction_check(aniso3(), env, 2, 0),
                    hypothesis_error);
    CHECK_THROWS_AS((void)obstruction_check(Spectrum({1.0, 2.0, 3.0}), env,
                                            2, 1),
                    hypothesis_error);
}
