#include "hessquot/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessquot/ode.hpp"
#include "hessquot/quadrature.hpp"
#include "hessquot/rootfind.hpp"

namespace hq {

namespace {

// Node-exact profile lookup: returns the stored value when r coincides with
// a grid node (the sampled-check grids are built to share nodes), otherwise
// falls back to interpolation.
double value_matched(const SampledProfile& p, double r) {
    auto it = std::lower_bound(p.r.begin(), p.r.end(), r);
    if (it != p.r.end() && std::abs(*it - r) <= 1e-12 * r)
        return p.v[std::size_t(it - p.r.begin())];
    if (it != p.r.begin() && std::abs(*(it - 1) - r) <= 1e-12 * r)
        return p.v[std::size_t(it - 1 - p.r.begin())];
    return p.value_at(r);
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
}

}  // namespace

BarrierSpec::BarrierSpec(Spectrum A_, int k_, int l_, double eta_,
                         double beta1_, double beta2_, double delta_,
                         double tau_, double r_omega_, double r0_, double R0_,
                         BoundaryData phi_, double Xi_, const GEnvelope& env)
    : A(std::move(A_)),
      k(k_),
      l(l_),
      eta(eta_),
      beta1(beta1_),
      beta2(beta2_),
      delta(delta_),
      tau(tau_),
      r_omega(r_omega_),
      r0(r0_),
      R0(R0_),
      phi(phi_),
      Xi(Xi_),
      pp{0, 0, 0.0, 0.0} {
    if (!(1 <= l && l < k && k <= A.n()))
        throw hypothesis_error("BarrierSpec: need 1 <= l < k <= n");
    if (!A.in_akl(k, l, 1e-8))
        throw hypothesis_error(
            "BarrierSpec: spectrum not normalized to sigma_k = sigma_l");
    pp = profile_params(A, k, l);
    if (!(pp.K() > 2.0))
        throw hypothesis_error(
            "BarrierSpec: decay exponent (k-l)/(t_up_k - t_lo_l) = " +
            std::to_string(pp.K()) + " must exceed 2");
    if (!(1.0 < r_omega && r_omega < r0 && r0 < R0))
        throw hypothesis_error("BarrierSpec: need 1 < r_omega < r0 < R0");
    if (!(eta >= 1.0)) throw hypothesis_error("BarrierSpec: eta >= 1 required");
    const double cnk = binom(A.n(), k), cnl = binom(A.n(), l);
    const double need =
        std::max(cnl / cnk * env.sup_gbar(), env.sup_gbar());
    if (!(ipow(Xi, k - l) > need))
        throw hypothesis_error(
            "BarrierSpec: Xi^{k-l} must dominate sup gbar (need > " +
            std::to_string(need) + ")");
}

BarrierFn::BarrierFn(Spectrum a, SampledProfile prof, double anchor,
                     double eta)
    : a_(std::move(a)), prof_(std::move(prof)), anchor_(anchor), eta_(eta) {
    const std::size_t N = prof_.r.size();
    cum_.assign(N, 0.0);
    for (std::size_t i = 1; i < N; ++i)
        cum_[i] = cum_[i - 1] +
                  0.5 * (prof_.r[i - 1] * prof_.v[i - 1] +
                         prof_.r[i] * prof_.v[i]) *
                      (prof_.r[i] - prof_.r[i - 1]);
    cum_eta_ = cum_at(eta_);
}

double BarrierFn::cum_at(double r) const {
    if (r <= prof_.r.front()) return 0.0;
    if (r >= prof_.r.back()) return cum_.back();
    auto it = std::upper_bound(prof_.r.begin(), prof_.r.end(), r);
    const std::size_t i = std::size_t(it - prof_.r.begin());  // r in [i-1, i)
    const double ra = prof_.r[i - 1], va = prof_.v[i - 1];
    const double vb = prof_.value_at(r);
    return cum_[i - 1] + 0.5 * (ra * va + r * vb) * (r - ra);
}

double BarrierFn::radius(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < a_.n(); ++i)
        s += a_[i] * x[std::size_t(i)] * x[std::size_t(i)];
    return std::sqrt(s);
}

double BarrierFn::w_of_r(double r) const {
    return anchor_ + cum_at(r) - cum_eta_;
}

double BarrierFn::value(std::span<const double> x) const {
    return w_of_r(radius(x));
}

double BarrierFn::sigma_of_hessian(std::span<const double> x, int j) const {
    const double r = radius(x);
    const double f = value_matched(prof_, r);
    const double fp = prof_.deriv_at(r);
    const int n = a_.n();
    std::vector<double> p(std::size_t(n), 0.0), q(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        p[std::size_t(i)] = f * a_[i];
        q[std::size_t(i)] = a_[i] * x[std::size_t(i)];
    }
    return rank_one_sigma(p, q, fp / r, j);
}

double BarrierFn::quotient(std::span<const double> x, int k, int l) const {
    return sigma_of_hessian(x, k) / sigma_of_hessian(x, l);
}

bool BarrierBuild::pass() const {
    for (const auto& rep : reports)
        if (!rep.pass) return false;
    return true;
}

namespace {

std::vector<double> random_unit(Rng& rng, int n) {
    std::vector<double> d(std::size_t(n), 0.0);
    double nn = 0.0;
    do {
        for (double& v : d) v = rng.normal();
        nn = norm2(d);
    } while (nn < 1e-6);
    for (double& v : d) v /= nn;
    return d;
}

// Sampled verification shared by the two one-sided barrier builds.
// sign = +1 checks quotient >= bound (subsolution), -1 checks <= (super).
BarrierBuild verify_barrier(const BarrierSpec& spec, const GEnvelope& env,
                            const SampledProfile& prof, double anchor,
                            Rng& rng, int n_points, double tol_scale,
                            int sign, const char* tag) {
    BarrierFn fn(spec.A, prof, anchor, spec.eta);
    // radii drawn from profile nodes >= eta so h is node-exact
    std::size_t i_lo = 0;
    while (i_lo < prof.r.size() && prof.r[i_lo] < spec.eta) ++i_lo;
    if (i_lo + 2 > prof.r.size())
        throw std::invalid_argument("barrier verify: profile ends before eta");

    CheckReport quot{std::string(tag) + "_quotient", n_points, kInf, {},
                     1e-8 * tol_scale, false};
    CheckReport conv{std::string(tag) + "_convexity", n_points, kInf, {},
                     1e-10 * tol_scale, false};
    const int n = spec.A.n();
    for (int pt = 0; pt < n_points; ++pt) {
        const std::size_t idx =
            i_lo + std::size_t(rng.uniform() * double(prof.r.size() - i_lo));
        const double r = prof.r[std::min(idx, prof.r.size() - 1)];
        std::vector<double> d = random_unit(rng, n);
        const double rd = fn.radius(d);
        for (double& v : d) v *= r / rd;  // now r_A(d) == r

        const double sk = fn.sigma_of_hessian(d, spec.k);
        const double sl = fn.sigma_of_hessian(d, spec.l);
        const double bound = (sign > 0) ? env.gbar(r) : env.gunder(r);
        const double m = double(sign) * (sk / sl - bound);
        if (m < quot.worst_margin) {
            quot.worst_margin = m;
            quot.location = d;
        }
        const double f = value_matched(prof, r);
        for (int j = 1; j <= spec.k; ++j) {
            const double sj = fn.sigma_of_hessian(d, j);
            const double scale =
                binom(n, j) * ipow(std::max(f * spec.A[n - 1], 1.0), j);
            const double cm = sj / scale;
            if (cm < conv.worst_margin) {
                conv.worst_margin = cm;
                conv.location = d;
            }
        }
    }
    quot.pass = quot.worst_margin >= -quot.tolerance;
    conv.pass = conv.worst_margin >= -conv.tolerance;
    return BarrierBuild{std::move(fn), {std::move(quot), std::move(conv)}};
}

}  // namespace

BarrierBuild build_subsolution(const BarrierSpec& spec, const GEnvelope& env,
                               const SampledProfile& h, Rng& rng, int n_points,
                               double tol_scale) {
    if (h.kind != SampledProfile::Kind::Subsolution)
        throw std::invalid_argument(
            "build_subsolution: profile must come from integrate_h");
    return verify_barrier(spec, env, h, spec.beta1, rng, n_points, tol_scale,
                          +1, "subsolution");
}

BarrierBuild build_supersolution(const BarrierSpec& spec, const GEnvelope& env,
                                 const SampledProfile& H, Rng& rng,
                                 int n_points, double tol_scale) {
    if (H.kind != SampledProfile::Kind::Supersolution)
        throw std::invalid_argument(
            "build_supersolution: profile must come from integrate_H");
    return verify_barrier(spec, env, H, spec.beta2, rng, n_points, tol_scale,
                          -1, "supersolution");
}

AsymptoticConstant asymptotic_constant(const SampledProfile& f,
                                       const SampledProfile& h0, double anchor,
                                       double eta) {
    if (!(eta >= f.r.front() - 1e-12 && eta < f.r.back()))
        throw std::invalid_argument(
            "asymptotic_constant: eta outside the profile grid");

    // int_0^eta theta h0: analytic stub below the h0 grid, trapezoid above
    double head = 0.5 * h0.r.front() * h0.r.front() * h0.v.front();
    std::size_t j = 1;
    for (; j < h0.r.size() && h0.r[j] <= eta; ++j)
        head += 0.5 * (h0.r[j - 1] * h0.v[j - 1] + h0.r[j] * h0.v[j]) *
                (h0.r[j] - h0.r[j - 1]);
    if (j < h0.r.size() && h0.r[j - 1] < eta)
        head += 0.5 *
                (h0.r[j - 1] * h0.v[j - 1] + eta * h0.value_at(eta)) *
                (eta - h0.r[j - 1]);

    // int_eta^R theta (f - h0) over the f grid
    auto integrand = [&](std::size_t i) {
        return f.r[i] * (f.v[i] - value_matched(h0, f.r[i]));
    };
    std::size_t i0 = 0;
    while (i0 < f.r.size() && f.r[i0] < eta - 1e-12 * eta) ++i0;
    double body = 0.0;
    if (i0 < f.r.size() && f.r[i0] > eta) {
        const double e_eta =
            eta * (f.value_at(eta) - h0.value_at(eta));
        body += 0.5 * (e_eta + integrand(i0)) * (f.r[i0] - eta);
    }
    for (std::size_t i = i0 + 1; i < f.r.size(); ++i)
        body += 0.5 * (integrand(i - 1) + integrand(i)) *
                (f.r[i] - f.r[i - 1]);

    // power-law tail beyond the grid, skipped when the integrand underflows
    const double R = f.r.back();
    double scale = 0.0;
    for (double v : f.v) scale = std::max(scale, std::abs(v));
    std::vector<double> xs, es;
    double emax = 0.0;
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        if (f.r[i] < 0.1 * R) continue;
        xs.push_back(f.r[i]);
        es.push_back(integrand(i));
        emax = std::max(emax, std::abs(f.v[i] - value_matched(h0, f.r[i])));
    }
    AsymptoticConstant out{anchor - head + body, 0.0, 0.0, 0.0};
    if (emax >= 1e-12 * scale) {
        const TailEstimate tail = power_tail(xs, es, R);
        out.tail = tail.value;
        out.tail_exponent = tail.exponent;
        out.tail_error = tail.error;
        out.value += tail.value;
    }
    return out;
}

// ---- BarrierAssembly -----------------------------------------------------

BarrierAssembly::BarrierAssembly(BarrierSpec spec, GEnvelope env,
                                 double r_max, int n_nodes, std::uint64_t seed,
                                 int n_points)
    : spec_(std::move(spec)),
      env_(std::move(env)),
      r_max_(r_max),
      n_nodes_(n_nodes),
      n_points_(n_points),
      rng_(seed) {
    // h0 grid shares every node of the [1, r_max] profile grids
    std::vector<double> grid = log_grid(1e-3, 1.0, 250);
    grid.pop_back();
    const std::vector<double> tail_grid = log_grid(1.0, r_max_, n_nodes_);
    grid.insert(grid.end(), tail_grid.begin(), tail_grid.end());
    h0_ = solve_h0_on(env_, spec_.pp, grid);
    H_ = integrate_H(spec_.tau, env_, spec_.pp, r_max_, n_nodes_);

    // boundary sample xi and their barrier centers
    const int n = spec_.A.n();
    const int n_xi = 64;
    for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
            std::vector<double> d(std::size_t(n), 0.0);
            d[std::size_t(i)] = sgn;
            xi_cache_.push_back(on_sphere(d, spec_.r_omega));
        }
    }
    while (int(xi_cache_.size()) < n_xi)
        xi_cache_.push_back(
            on_sphere(random_unit(rng_, n), spec_.r_omega));
    for (const auto& xi : xi_cache_) xbar_cache_.push_back(xbar(xi));

    // zeta1 = min rho_xi over E_{r0} \ Omega (sampled, 5% safety downward)
    double z1 = kInf;
    for (int pt = 0; pt < n_points_; ++pt) {
        const double rr =
            spec_.r_omega + (spec_.r0 - spec_.r_omega) * rng_.uniform();
        const auto x = on_sphere(random_unit(rng_, n), rr);
        for (const auto& xi : xi_cache_) z1 = std::min(z1, rho_xi(xi, x));
    }
    zeta1_ = z1 - 0.05 * (std::abs(z1) + 1.0);

    // delta_hat: min_{dE_{R0}} W_delta exceeds max_{dE_{R0}} phi_hat
    double phimax_R0 = -kInf, phimax_shell = -kInf;
    for (int pt = 0; pt < n_points_; ++pt) {
        const auto d = random_unit(rng_, n);
        phimax_R0 = std::max(phimax_R0, phi_hat(on_sphere(d, spec_.R0)));
        const double rr =
            spec_.r_omega + (spec_.R0 - spec_.r_omega) * rng_.uniform();
        phimax_shell = std::max(phimax_shell, phi_hat(on_sphere(d, rr)));
    }
    phimax_R0 += 0.05 * (std::abs(phimax_R0) + 1.0);
    phimax_shell += 0.05 * (std::abs(phimax_shell) + 1.0);

    const double delta_floor =
        std::pow(env_.sup_gbar(), 1.0 / double(spec_.k - spec_.l));
    double dh = delta_floor * 1.1 + 0.1;
    double dh_lo = dh;
    for (int it = 0;; ++it) {
        const SampledProfile h =
            integrate_h(dh, env_, spec_.pp, r_max_, n_nodes_);
        BarrierFn W(spec_.A, h, zeta1_, spec_.r0);
        if (W.w_of_r(spec_.R0) > phimax_R0) break;
        dh_lo = dh;
        dh *= 2.0;
        if (it > 60)
            throw numeric_error("BarrierAssembly: delta_hat search failed");
    }
    // tighten the bracket: the doubling overshoot would propagate into
    // mu(delta_hat) and inflate c_tilde by up to a factor of two
    for (int it = 0; it < 30 && dh - dh_lo > 1e-6 * dh; ++it) {
        const double mid = 0.5 * (dh_lo + dh);
        const SampledProfile h =
            integrate_h(mid, env_, spec_.pp, r_max_, n_nodes_);
        BarrierFn W(spec_.A, h, zeta1_, spec_.r0);
        (W.w_of_r(spec_.R0) > phimax_R0 ? dh : dh_lo) = mid;
    }
    delta_hat_ = dh;

    // c_hat and c_tilde
    const double nu0 = asymptotic_constant(H_, h0_, 0.0, 1.0).value;
    c_hat_ = phimax_shell + nu0;
    c_tilde_ = std::max({c_hat_, mu(delta_hat_), phimax_shell});
}

std::vector<double> BarrierAssembly::on_sphere(std::span<const double> d,
                                               double rho) const {
    const int n = spec_.A.n();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += spec_.A[i] * d[std::size_t(i)] * d[std::size_t(i)];
    const double f = rho / std::sqrt(s);
    std::vector<double> x(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) x[std::size_t(i)] = f * d[std::size_t(i)];
    return x;
}

std::vector<double> BarrierAssembly::random_direction() {
    return random_unit(rng_, spec_.A.n());
}

double BarrierAssembly::mu(double delta) const {
    const SampledProfile h =
        integrate_h(delta, env_, spec_.pp, r_max_, n_nodes_);
    return asymptotic_constant(h, h0_, zeta1_, spec_.r0).value;
}

double BarrierAssembly::solve_delta_for_c(double c) const {
    if (!(c > c_tilde_))
        throw below_threshold(
            "solve_delta_for_c: c must exceed c_tilde = " +
                std::to_string(c_tilde_),
            c_tilde_);
    double lo = delta_hat_, hi = delta_hat_;
    double mu_hi = mu(hi);
    int guard = 0;
    while (mu_hi < c) {
        lo = hi;
        hi *= 2.0;
        mu_hi = mu(hi);
        if (++guard > 60)
            throw numeric_error("solve_delta_for_c: bracket failed");
    }
    // bisect mu(delta) = c; mu is strictly increasing in delta
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = mu(mid);
        if (std::abs(m - c) < 1e-8) return mid;
        if (m < c)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> BarrierAssembly::xbar(std::span<const double> xi) const {
    const int n = spec_.A.n();
    // base point cancelling the tangential gradient of phi - rho_xi at xi
    std::vector<double> base(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i)
        base[std::size_t(i)] =
            -(spec_.phi.q / spec_.Xi) * xi[std::size_t(i)] / spec_.A[i];
    Rng sampler(0x5eed);  // fixed internal sample of the boundary
    std::vector<std::vector<double>> bnd;
    for (int pt = 0; pt < 400; ++pt)
        bnd.push_back(on_sphere(random_unit(sampler, n), spec_.r_omega));

    for (double s = 0.5; s < 1e9; s *= 2.0) {
        std::vector<double> cand = base;
        for (int i = 0; i < n; ++i)
            cand[std::size_t(i)] -= s * xi[std::size_t(i)];
        bool ok = true;
        const double phixi = spec_.phi(xi);
        for (const auto& x : bnd) {
            double dist2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double dxi = x[std::size_t(i)] - xi[std::size_t(i)];
                dist2 += spec_.A[i] * dxi * dxi;
            }
            if (dist2 < 1e-8) continue;
            // phi(x) - rho_xi(x) with the candidate center
            double qx = 0.0, qxi = 0.0;
            for (int i = 0; i < n; ++i) {
                const double dx = x[std::size_t(i)] - cand[std::size_t(i)];
                const double dxi = xi[std::size_t(i)] - cand[std::size_t(i)];
                qx += spec_.A[i] * dx * dx;
                qxi += spec_.A[i] * dxi * dxi;
            }
            const double rho = phixi + 0.5 * spec_.Xi * (qx - qxi);
            if (!(spec_.phi(x) - rho > 0.0)) {
                ok = false;
                break;
            }
        }
        if (ok) return cand;
    }
    throw numeric_error(
        "xbar: no admissible barrier center found along -xi");
}

double BarrierAssembly::rho_xi(std::span<const double> xi,
                               std::span<const double> x) const {
    // locate the cached center; fall back to a fresh search
    std::vector<double> xb;
    for (std::size_t c = 0; c < xi_cache_.size(); ++c) {
        double d = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i)
            d += std::abs(xi_cache_[c][i] - xi[i]);
        if (d < 1e-12) {
            xb = xbar_cache_[c];
            break;
        }
    }
    if (xb.empty()) xb = xbar(xi);
    double qx = 0.0, qxi = 0.0;
    for (int i = 0; i < spec_.A.n(); ++i) {
        const double dx = x[std::size_t(i)] - xb[std::size_t(i)];
        const double dxi = xi[std::size_t(i)] - xb[std::size_t(i)];
        qx += spec_.A[i] * dx * dx;
        qxi += spec_.A[i] * dxi * dxi;
    }
    return spec_.phi(xi) + 0.5 * spec_.Xi * (qx - qxi);
}

CheckReport BarrierAssembly::verify_quadratic_barrier(
    std::span<const double> xi, int n_points) {
    CheckReport rep{"quadratic_barrier", n_points, kInf, {}, 0.0, false};
    double at_xi = std::abs(spec_.phi(xi) - rho_xi(xi, xi));
    for (int pt = 0; pt < n_points; ++pt) {
        const auto x = on_sphere(random_unit(rng_, spec_.A.n()), spec_.r_omega);
        double dist2 = 0.0;
        for (int i = 0; i < spec_.A.n(); ++i) {
            const double d = x[std::size_t(i)] - xi[std::size_t(i)];
            dist2 += spec_.A[i] * d * d;
        }
        if (dist2 < 1e-6) continue;
        const double m = spec_.phi(x) - rho_xi(xi, x);
        if (m < rep.worst_margin) {
            rep.worst_margin = m;
            rep.location = x;
        }
    }
    rep.pass = rep.worst_margin > 0.0 && at_xi < 1e-9;
    return rep;
}

double BarrierAssembly::phi_hat(std::span<const double> x) const {
    double best = -kInf;
    for (std::size_t c = 0; c < xi_cache_.size(); ++c) {
        const auto& xi = xi_cache_[c];
        const auto& xb = xbar_cache_[c];
        double qx = 0.0, qxi = 0.0;
        for (int i = 0; i < spec_.A.n(); ++i) {
            const double dx = x[std::size_t(i)] - xb[std::size_t(i)];
            const double dxi = xi[std::size_t(i)] - xb[std::size_t(i)];
            qx += spec_.A[i] * dx * dx;
            qxi += spec_.A[i] * dxi * dxi;
        }
        best = std::max(best, spec_.phi(xi) + 0.5 * spec_.Xi * (qx - qxi));
    }
    return best;
}

bool BarrierAssembly::EnvelopePair::pass() const {
    for (const auto& rep : reports)
        if (!rep.pass) return false;
    return true;
}

BarrierAssembly::EnvelopePair BarrierAssembly::assemble(double c) {
    const double delta = solve_delta_for_c(c);
    const SampledProfile h =
        integrate_h(delta, env_, spec_.pp, r_max_, n_nodes_);
    BarrierFn W(spec_.A, h, zeta1_, spec_.r0);
    const double nu0 = asymptotic_constant(H_, h0_, 0.0, 1.0).value;
    const double zeta2 = c - nu0;
    BarrierFn Psi(spec_.A, H_, zeta2, 1.0);

    const double r_omega = spec_.r_omega, R0 = spec_.R0;
    auto lower_fn = [this, W, r_omega, R0](const std::vector<double>& x) {
        const double r = W.radius(x);
        const double w = W.value(x);
        if (r <= R0) return std::max(w, phi_hat(x));
        return w;
    };
    auto upper_fn = [Psi](const std::vector<double>& x) {
        return Psi.value(x);
    };

    EnvelopePair out;
    out.c = c;
    out.delta = delta;
    out.zeta2 = zeta2;
    out.lower = lower_fn;
    out.upper = upper_fn;

    // 1. ordering u_lower <= u_upper over three zones
    CheckReport ord{"envelope_ordering", 0, kInf, {}, 1e-8, false};
    auto probe = [&](double rr) {
        const auto x = on_sphere(random_direction(), rr);
        const double m = upper_fn(x) - lower_fn(x);
        ++ord.n_points;
        if (m < ord.worst_margin) {
            ord.worst_margin = m;
            ord.location = x;
        }
    };
    const int per_zone = std::max(1, n_points_ / 3);
    for (int pt = 0; pt < per_zone; ++pt) {
        probe(r_omega + (spec_.r0 - r_omega) * rng_.uniform());
        probe(spec_.r0 + (R0 - spec_.r0) * rng_.uniform());
        probe(R0 * std::pow(1e3 / R0, rng_.uniform()));
    }
    ord.pass = ord.worst_margin >= -ord.tolerance;
    out.reports.push_back(ord);

    // 2. boundary data: u_lower = phi, u_upper >= phi at the sampled xi
    CheckReport bd{"boundary_data", int(xi_cache_.size()), kInf, {}, 1e-9,
                   false};
    for (const auto& xi : xi_cache_) {
        const double ph = spec_.phi(xi);
        const double m1 = -std::abs(lower_fn(xi) - ph);
        const double m2 = upper_fn(xi) - ph;
        const double m = std::min(m1, m2);
        if (m < bd.worst_margin) {
            bd.worst_margin = m;
            bd.location = xi;
        }
    }
    bd.pass = bd.worst_margin >= -bd.tolerance;
    out.reports.push_back(bd);

    // 3. shared far-field constant: |u_lower - u_upper| < 1e-2 at r = 1e3
    CheckReport far{"far_field_constant", 32, kInf, {}, 0.0, false};
    for (int pt = 0; pt < 32; ++pt) {
        const auto x = on_sphere(random_direction(), 1e3);
        const double m = 1e-2 - std::abs(upper_fn(x) - lower_fn(x));
        if (m < far.worst_margin) {
            far.worst_margin = m;
            far.location = x;
        }
    }
    far.pass = far.worst_margin >= 0.0;
    out.reports.push_back(far);

    // 4. gluing across dE_{R0}: W must already dominate phi_hat there
    CheckReport seam{"seam_continuity", 128, kInf, {}, 1e-9, false};
    for (int pt = 0; pt < 128; ++pt) {
        const auto x = on_sphere(random_direction(), R0);
        const double m = W.value(x) - phi_hat(x);
        if (m < seam.worst_margin) {
            seam.worst_margin = m;
            seam.location = x;
        }
    }
    seam.pass = seam.worst_margin >= -seam.tolerance;
    out.reports.push_back(seam);

    return out;
}

// ---- obstruction test ----------------------------------------------------

ObstructionReport obstruction_check(const Spectrum& A, const GEnvelope& env,
                                    int k, int l, double r_max, int n_nodes) {
    const int n = A.n();
    if (!(1 <= l && l < k && k <= n - 1))
        throw hypothesis_error("obstruction_check: need 1 <= l < k <= n-1");
    if (!A.in_akl(k, l, 1e-8))
        throw hypothesis_error("obstruction_check: spectrum not in A_{k,l}");

    auto residuals = [&](const Spectrum& a) {
        const auto tab = exclusion_table(a);
        const double sk = a.sigma(k), sl = a.sigma(l);
        auto axis_term = [&](int i, int j, double J) {
            // sigma_{j-1;i} a_i J^{j-1} coefficient of r J'
            return tab[std::size_t(i)][std::size_t(j - 1)] * a[i] *
                   ipow(J, j - 1);
        };
        // fit J along axis 0: sigma_k-equation solved as an ODE
        auto rhs = [&](double r, double J) {
            const double g = env.gbar(r);
            const double num = g * sl * ipow(J, l) - sk * ipow(J, k);
            const double den =
                r * (axis_term(0, k, J) - g * axis_term(0, l, J));
            if (std::abs(den) < 1e-12 * (1.0 + std::abs(num)))
                throw numeric_error("obstruction_check: degenerate axis ODE");
            return num / den;
        };
        const double J0 =
            1.5 * std::pow(env.gbar(1.0), 1.0 / double(k - l));
        const std::vector<double> grid = log_grid(1.0, r_max, n_nodes);
        const std::vector<double> J = rk45_on_grid(rhs, grid, J0, 1e-12, 1e-14);

        std::vector<double> per_axis(std::size_t(n - 1), 0.0);
        for (std::size_t m = 0; m < grid.size(); ++m) {
            const double r = grid[m], Jv = J[m];
            const double Jp = rhs(r, Jv);
            const double g = env.gbar(r);
            for (int i = 1; i < n; ++i) {
                const double E = sk * ipow(Jv, k) +
                                 r * Jp * axis_term(i, k, Jv) -
                                 g * (sl * ipow(Jv, l) +
                                      r * Jp * axis_term(i, l, Jv));
                const double scale = sk * ipow(Jv, k) + g * sl * ipow(Jv, l) +
                                     std::abs(r * Jp) *
                                         (axis_term(i, k, Jv) +
                                          g * axis_term(i, l, Jv));
                per_axis[std::size_t(i - 1)] = std::max(
                    per_axis[std::size_t(i - 1)], std::abs(E) / scale);
            }
        }
        return per_axis;
    };

    ObstructionReport rep;
    rep.per_axis = residuals(A);
    rep.max_residual = 0.0;
    for (double v : rep.per_axis)
        rep.max_residual = std::max(rep.max_residual, v);
    rep.isotropic = (A[n - 1] - A[0]) < 1e-12 * A[n - 1];

    // homotopy from the isotropic spectrum toward A
    const double a_hat = Spectrum::isotropic(n, k, l)[0];
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::vector<double> entries(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i)
            entries[std::size_t(i)] = (1.0 - t) * a_hat + t * A[i];
        const Spectrum at = Spectrum(entries).normalized_to_akl(k, l);
        const auto pa = residuals(at);
        double worst = 0.0;
        for (double v : pa) worst = std::max(worst, v);
        rep.homotopy.push_back(worst);
    }
    return rep;
}

}  // namespace hq
