#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hessquot/profiles.hpp"
#include "hessquot/symmetric_kernel.hpp"

using namespace hq;

namespace {

Spectrum aniso3() {
    // sigma_2 = sigma_1 family in n = 3
    return Spectrum({0.99, 0.99, 1.0203061224489796});
}

// Constant base with a strictly decaying upper envelope (C1 > 0).
GEnvelope dec_env() {
    return envelope_build(G0Spec::constant(1.0), 0.1, 3.0, 5.0);
}

// Increasing base 2 - 1/(1+r): gbar rises with r.
GEnvelope inc_env() {
    return envelope_build(G0Spec::rational(2.0, -1.0, 1.0), 0.1, 3.0, 5.0);
}

}  // namespace

TEST_CASE("envelope validation rejects broken hypotheses") {
    CHECK_THROWS_AS(envelope_build(G0Spec::constant(1.0), 0.1, 2.0, 1.0),
                    hypothesis_error);  // beta must exceed 2
    CHECK_THROWS_AS(envelope_build(G0Spec::constant(1.0), -0.1, 3.0, 1.0),
                    hypothesis_error);  // C1 >= 0
    CHECK_THROWS_AS(envelope_build(G0Spec::constant(1.0), 0.1, 3.0, -1.0),
                    hypothesis_error);  // theta0 > 0
    // C1 so large that gunder dips below zero near theta0
    CHECK_THROWS_AS(envelope_build(G0Spec::constant(0.5), 10.0, 3.0, 1.0),
                    hypothesis_error);
    // decreasing base: gunder cannot be non-decreasing below theta0
    CHECK_THROWS_AS(envelope_build(G0Spec::rational(1.0, 0.5, 1.0), 0.1, 3.0,
                                   5.0),
                    hypothesis_error);
}

TEST_CASE("envelope ordering and monotonicity classification") {
    const GEnvelope dec = dec_env();
    CHECK(dec.gbar_nonincreasing());
    const GEnvelope inc = inc_env();
    CHECK_FALSE(inc.gbar_nonincreasing());
    for (const GEnvelope* env : {&dec, &inc})
        for (double r : {0.01, 0.5, 1.0, 4.9, 5.1, 50.0, 1e4}) {
            CHECK(env->gunder(r) > 0.0);
            CHECK(env->gunder(r) <= env->g0(r) + 1e-14);
            CHECK(env->g0(r) <= env->gbar(r) + 1e-14);
        }
    CHECK(dec.sup_gbar() == doctest::Approx(dec.gbar(1.0)).epsilon(1e-13));
    CHECK(inc.sup_gbar() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("degenerate constant-g case: all three profiles are constant") {
    const GEnvelope env = envelope_build(G0Spec::constant(1.0), 0.0, 3.0, 1.0);
    const ProfileParams pp = profile_params(Spectrum::isotropic(3, 2, 1), 2, 1);

    const SampledProfile h = integrate_h(1.0 + 1e-9, env, pp, 200.0, 300);
    for (double v : h.v) CHECK(std::abs(v - 1.0) < 1e-6);

    const double tau = 1.0 - 1e-9;
    const SampledProfile H = integrate_H(tau, env, pp, 200.0, 300);
    for (double v : H.v) CHECK(std::abs(v - 1.0) < 1e-6);

    const SampledProfile h0 = solve_h0(env, pp, 200.0);
    for (double v : h0.v) CHECK(std::abs(v - 1.0) < 1e-10);
    // the constant fixed point g^{1/(k-l)} is reproduced for any level
    const GEnvelope env2 = envelope_build(G0Spec::constant(2.0), 0.0, 3.0, 1.0);
    const SampledProfile h02 = solve_h0(env2, pp, 200.0);
    for (double v : h02.v) CHECK(std::abs(v - 2.0) < 1e-10);
}

TEST_CASE("subsolution profile: sandwich, monotonicity in r and in delta") {
    const GEnvelope env = dec_env();
    const ProfileParams pp = profile_params(aniso3(), 2, 1);
    const double sup_root = env.sup_gbar();  // k - l = 1
    REQUIRE(pp.K() > 2.0);

    const double d1 = sup_root + 0.3, d2 = sup_root + 1.0;
    const SampledProfile h1 = integrate_h(d1, env, pp, 1e3, 600);
    const SampledProfile h2 = integrate_h(d2, env, pp, 1e3, 600);
    CHECK(h1.v.front() == doctest::Approx(d1));
    for (std::size_t i = 0; i < h1.r.size(); ++i) {
        const double lo = env.gbar(h1.r[i]);
        CHECK(h1.v[i] >= lo - 1e-9);
        CHECK(h1.v[i] <= d1 + 1e-9);
        CHECK(h1.dv[i] <= 1e-12);
        CHECK(h2.v[i] > h1.v[i]);  // strictly increasing in delta
        if (i > 0) CHECK(h1.v[i] <= h1.v[i - 1] + 1e-12);
    }
    CHECK_THROWS_AS(
        (void)integrate_h(sup_root * 0.999, env, pp, 100.0, 100),
        hypothesis_error);
}

TEST_CASE("supersolution profile: sandwich and monotonicity in tau") {
    const GEnvelope env = dec_env();
    const ProfileParams pp = profile_params(aniso3(), 2, 1);
    const double g1 = env.gunder(1.0);
    const double t1 = 0.6 * g1 + 0.4 * pp.ratio() * g1;  // k - l = 1
    const double t2 = 0.85 * g1 + 0.15 * pp.ratio() * g1;
    const SampledProfile H1 = integrate_H(t1, env, pp, 1e3, 600);
    const SampledProfile H2 = integrate_H(t2, env, pp, 1e3, 600);
    for (std::size_t i = 0; i < H1.r.size(); ++i) {
        const double gv = env.gunder(H1.r[i]);
        CHECK(H1.v[i] > pp.ratio() * gv * (1.0 - 1e-9));
        CHECK(H1.v[i] < gv * (1.0 + 1e-9));
        CHECK(H2.v[i] > H1.v[i]);
        if (i > 0) CHECK(H1.v[i] >= H1.v[i - 1] - 1e-12);
    }
    CHECK_THROWS_AS((void)integrate_H(g1 * 1.01, env, pp, 100.0, 100),
                    hypothesis_error);
    CHECK_THROWS_AS((void)integrate_H(pp.ratio() * g1 * 0.99, env, pp, 100.0,
                                      100),
                    hypothesis_error);
}

TEST_CASE("rising gbar: profile tracks the running-infimum lower barrier") {
    const GEnvelope env = inc_env();
    REQUIRE_FALSE(env.gbar_nonincreasing());
    const ProfileParams pp = profile_params(aniso3(), 2, 1);
    const double delta = env.sup_gbar() + 0.5;
    const SampledProfile h = integrate_h(delta, env, pp, 1e3, 600);
    double run_inf = kInf;
    for (std::size_t i = 0; i < h.r.size(); ++i) {
        run_inf = std::min(run_inf, env.gbar(h.r[i]));
        CHECK(h.v[i] >= run_inf - 1e-9);
        CHECK(h.v[i] <= delta + 1e-9);
    }
    // far field: h settles on the limiting root g0(inf)^{1/(k-l)} = 2
    CHECK(h.v.back() > 1.95);
    CHECK(h.v.back() < 2.0 + 1e-6);
}

TEST_CASE("h0 fixed point: residual, range, and the h/h0 -> 1 limit") {
    const ProfileParams pp = profile_params(aniso3(), 2, 1);
    // non-constant base: residual of the integral fixed point
    const GEnvelope inc = inc_env();
    const SampledProfile h0i = solve_h0(inc, pp, 2e3);
    CHECK(h0_fixed_point_residual(h0i, inc, pp) < 1e-8);
    // h0 stays inside the range of g0^{1/(k-l)} = [1, 2]
    for (double v : h0i.v) {
        CHECK(v <= 2.0 + 1e-9);
        CHECK(v >= 1.0 - 1e-9);
    }
    // shared asymptote: h(r)/h0(r) -> 1
    const GEnvelope dec = dec_env();
    const SampledProfile h0 = solve_h0(dec, pp, 2e3);
    CHECK(h0_fixed_point_residual(h0, dec, pp) < 1e-8);
    const SampledProfile h =
        integrate_h(dec.sup_gbar() + 0.5, dec, pp, 2e3, 900);
    const double ratio = h.value_at(1e3) / h0.value_at(1e3);
    CHECK(std::abs(ratio - 1.0) < 1e-2);
}

TEST_CASE("isotropic constant-g profile conserves r^K(h^3 - g h)") {
    // For t_upper = 3/4, t_lower = 1/4 (isotropic n = 4, k = 3, l = 1) the
    // ODE has the first integral r^4 (h^3 - g h) with constant g.
    const GEnvelope env = envelope_build(G0Spec::constant(1.3), 0.0, 3.0, 1.0);
    const ProfileParams pp = profile_params(Spectrum::isotropic(4, 3, 1), 3, 1);
    CHECK(pp.t_upper_k == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(pp.t_lower_l == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(pp.K() == doctest::Approx(4.0).epsilon(1e-13));
    const double delta = std::sqrt(1.3) + 0.4;
    const SampledProfile h = integrate_h(delta, env, pp, 30.0, 300);
    const double Q0 = delta * (delta * delta - 1.3);
    for (std::size_t i = 0; i < h.r.size(); ++i) {
        // the r^4 factor amplifies the ODE tolerance; keep r modest
        const double Q = std::pow(h.r[i], 4.0) * h.v[i] *
                         (h.v[i] * h.v[i] - 1.3);
        CHECK(Q == doctest::Approx(Q0).epsilon(1e-4));
    }
}

TEST_CASE("profile interpolators agree with the samples") {
    const GEnvelope env = envelope_build(G0Spec::constant(1.0), 0.1, 3.0, 2.0);
    const ProfileParams pp = profile_params(aniso3(), 2, 1);
    const SampledProfile h =
        integrate_h(env.sup_gbar() + 0.5, env, pp, 100.0, 200);
    for (std::size_t i = 0; i < h.r.size(); i += 17)
        CHECK(h.value_at(h.r[i]) == doctest::Approx(h.v[i]).epsilon(1e-12));
    // between nodes the interpolant is sandwiched by the neighbours
    for (std::size_t i = 1; i < h.r.size(); i += 13) {
        const double rm = std::sqrt(h.r[i - 1] * h.r[i]);
        const double v = h.value_at(rm);
        CHECK(v <= std::max(h.v[i - 1], h.v[i]) + 1e-12);
        CHECK(v >= std::min(h.v[i - 1], h.v[i]) - 1e-12);
    }
}
