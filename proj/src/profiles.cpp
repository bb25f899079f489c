#include "hessquot/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessquot/ode.hpp"

namespace hq {

double G0Spec::eval(double r) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::Rational:
            return limit + amp * std::pow(1.0 + r, -power);
        case Kind::Tabulated: {
            if (table.empty())
                throw std::invalid_argument("G0Spec: empty table");
            if (r <= table.front().first) return table.front().second;
            if (r >= table.back().first) return table.back().second;
            // log-linear in r between bracketing samples
            auto it = std::lower_bound(
                table.begin(), table.end(), r,
                [](const std::pair<double, double>& p, double rr) {
                    return p.first < rr;
                });
            const auto [r1, v1] = *it;
            const auto [r0, v0] = *(it - 1);
            const double t = std::log(r / r0) / std::log(r1 / r0);
            return v0 + t * (v1 - v0);
        }
    }
    return value;
}

GEnvelope::GEnvelope(G0Spec g0, double C1, double beta, double theta0)
    : g0_(std::move(g0)), C1_(C1), beta_(beta), theta0_(theta0) {
    if (!(beta_ > 2.0))
        throw hypothesis_error("envelope_build: requires beta > 2");
    if (!(C1_ >= 0.0))
        throw hypothesis_error("envelope_build: requires C1 >= 0");
    if (!(theta0_ > 0.0))
        throw hypothesis_error("envelope_build: requires theta0 > 0");

    // Validation grid covering both the constant-offset region below theta0
    // and the far tail; limits appended for the r -> infinity behaviour.
    const double hi = std::max(10.0 * theta0_, 1e4);
    std::vector<double> grid = log_grid(1e-3, hi, 400);
    double prev_gu = -kInf, prev_gb = kInf;
    double sup_gb = -kInf, inf_gu = kInf;
    for (double r : grid) {
        const double gu = gunder(r), gb = gbar(r), g0v = g0_.eval(r);
        if (!(gu > 0.0))
            throw hypothesis_error(
                "envelope_build: gunder <= 0 at r = " + std::to_string(r) +
                " (reduce C1 or raise theta0)");
        if (!(gu <= g0v + 1e-12 && g0v <= gb + 1e-12))
            throw hypothesis_error("envelope_build: ordering gunder <= g0 <= "
                                   "gbar fails at r = " + std::to_string(r));
        if (gu < prev_gu - 1e-12 * std::abs(prev_gu))
            throw hypothesis_error(
                "envelope_build: gunder not monotone at r = " +
                std::to_string(r) + " (consider a larger theta0)");
        prev_gu = gu;
        if (r >= 1.0) {
            sup_gb = std::max(sup_gb, gb);
            if (gb > prev_gb + 1e-12 * std::abs(prev_gb))
                gbar_nonincreasing_ = false;
            prev_gb = gb;
        }
        inf_gu = std::min(inf_gu, gu);
    }
    // r -> infinity limit value (tail of the offset vanishes)
    const double g_inf = g0_.eval(1e12);
    sup_gbar_ = std::max(sup_gb, g_inf);
    inf_gunder_ = std::min(inf_gu, g_inf);
    if (g_inf > gbar(hi) + 1e-12 * std::abs(g_inf)) gbar_nonincreasing_ = false;
}

double GEnvelope::gbar(double r) const {
    const double off = C1_ * std::pow(std::max(r, theta0_), -beta_);
    return g0_.eval(r) + off;
}

double GEnvelope::gunder(double r) const {
    const double off = C1_ * std::pow(std::max(r, theta0_), -beta_);
    return g0_.eval(r) - off;
}

ProfileParams profile_params(const Spectrum& a, int k, int l) {
    if (!(0 <= l && l < k && k <= a.n()))
        throw std::invalid_argument("profile_params: need 0 <= l < k <= n");
    return {k, l, t_bounds(a, k).t_upper, t_bounds(a, l).t_lower};
}

double SampledProfile::value_at(double rr) const {
    if (rr <= r.front()) return v.front();
    if (rr >= r.back()) return v.back();
    auto it = std::lower_bound(r.begin(), r.end(), rr);
    const std::size_t i = std::size_t(it - r.begin());
    const double t = std::log(rr / r[i - 1]) / std::log(r[i] / r[i - 1]);
    return v[i - 1] + t * (v[i] - v[i - 1]);
}

double SampledProfile::deriv_at(double rr) const {
    if (rr <= r.front()) return dv.front();
    if (rr >= r.back()) return dv.back();
    auto it = std::lower_bound(r.begin(), r.end(), rr);
    const std::size_t i = std::size_t(it - r.begin());
    const double t = std::log(rr / r[i - 1]) / std::log(r[i] / r[i - 1]);
    return dv[i - 1] + t * (dv[i] - dv[i - 1]);
}

namespace {

// Shared right-hand side of the two profile ODEs:
//   f' = -(1/r) (f / t_upper) (f^{k-l} - g) / (f^{k-l} - g ratio).
// The denominator is guarded from below by g (1 - ratio) / 2, which is
// unreachable while the sandwich bounds hold.
template <class G>
double profile_rhs(double r, double f, const G& g, const ProfileParams& pp) {
    const double gv = g(r);
    const double fp = ipow(f, pp.k - pp.l);
    const double den = fp - gv * pp.ratio();
    const double guard = 0.5 * gv * (1.0 - pp.ratio());
    if (den < guard)
        throw numeric_error(
            "profile ODE: denominator under guard at r = " + std::to_string(r));
    return -(f / (pp.t_upper_k * r)) * (fp - gv) / den;
}

// Base output grid augmented with probe pairs r_c e^{+-eps} used by the
// conserved-ratio check; returns (grid, indices of base nodes).
struct AugGrid {
    std::vector<double> grid;
    std::vector<std::size_t> base_idx;
    std::vector<std::size_t> probe_lo, probe_hi;  // paired probe positions
};

AugGrid augment_grid(const std::vector<double>& base, double theta0) {
    constexpr double eps = 1e-4;
    const double lo = base.front(), hi = base.back();
    std::vector<double> probes;
    for (double rc : log_grid(lo * 1.5, hi / 1.5, 16)) {
        // keep probes clear of the envelope kink at theta0
        if (std::abs(std::log(rc / theta0)) < 0.01) continue;
        probes.push_back(rc * std::exp(-eps));
        probes.push_back(rc * std::exp(eps));
    }
    std::vector<double> all = base;
    all.insert(all.end(), probes.begin(), probes.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    AugGrid out;
    out.grid = all;
    auto find = [&](double r) {
        return std::size_t(std::lower_bound(all.begin(), all.end(), r) -
                           all.begin());
    };
    for (double r : base) out.base_idx.push_back(find(r));
    for (std::size_t p = 0; p + 1 < probes.size(); p += 2) {
        out.probe_lo.push_back(find(probes[p]));
        out.probe_hi.push_back(find(probes[p + 1]));
    }
    return out;
}

// Conserved-ratio identity at the probe midpoints: the centered difference
// quotient d(r^K f^{K t_up}) / d(r^K f^{K t_lo}) must reproduce the driving
// g. Computed through log-space differences to avoid overflow in r^K.
template <class G>
void quotient_check(const AugGrid& ag, const std::vector<double>& f,
                    const G& g, const ProfileParams& pp, const char* tag) {
    const double K = pp.K();
    for (std::size_t p = 0; p < ag.probe_lo.size(); ++p) {
        const std::size_t i0 = ag.probe_lo[p], i1 = ag.probe_hi[p];
        const double r0 = ag.grid[i0], r1 = ag.grid[i1];
        const double dt = std::log(r1 / r0);
        const double dlnF =
            K * dt + K * pp.t_upper_k * std::log(f[i1] / f[i0]);
        const double dlnG =
            K * dt + K * pp.t_lower_l * std::log(f[i1] / f[i0]);
        // F'/G' = (F/G) (lnF)' / (lnG)'; at the shared midpoint F/G = f^{k-l}
        const double rm = std::sqrt(r0 * r1);
        const double fm = std::sqrt(f[i0] * f[i1]);
        const double ratio = ipow(fm, pp.k - pp.l) * dlnF / dlnG;
        const double gv = g(rm);
        if (std::abs(ratio - gv) > 1e-6 * gv)
            throw numeric_error(std::string(tag) +
                                ": conserved-ratio identity fails at r = " +
                                std::to_string(rm));
    }
}

}  // namespace

SampledProfile integrate_h(double delta, const GEnvelope& env,
                           const ProfileParams& pp, double r_max,
                           int n_nodes) {
    if (!(pp.ratio() < 1.0))
        throw hypothesis_error("integrate_h: requires t_lower_l < t_upper_k");
    const double sup_root =
        std::pow(env.sup_gbar(), 1.0 / double(pp.k - pp.l));
    if (!(delta > sup_root))
        throw hypothesis_error(
            "integrate_h: delta must exceed sup gbar^{1/(k-l)} = " +
            std::to_string(sup_root));
    auto g = [&](double r) { return env.gbar(r); };
    auto rhs = [&](double r, double f) { return profile_rhs(r, f, g, pp); };

    const AugGrid ag = augment_grid(log_grid(1.0, r_max, n_nodes),
                                    env.theta0());
    const std::vector<double> f = rk45_on_grid(rhs, ag.grid, delta, 1e-12,
                                               1e-14);
    quotient_check(ag, f, g, pp, "integrate_h");

    SampledProfile out;
    out.kind = SampledProfile::Kind::Subsolution;
    out.param = delta;
    // For a non-increasing gbar the band [gbar^{1/(k-l)}, delta] is an
    // invariant region and h is monotone decreasing.  When gbar rises the
    // rising root can cross the profile (h then tracks it from below with
    // h' > 0), and only the running infimum of the root is a lower barrier:
    // below it h' > 0, so by a last-crossing argument h never drops under it.
    const bool strict = env.gbar_nonincreasing();
    double run_inf = kInf;
    for (std::size_t j = 0; j < ag.base_idx.size(); ++j) {
        const double r = ag.grid[ag.base_idx[j]];
        const double v = f[ag.base_idx[j]];
        const double root = std::pow(env.gbar(r), 1.0 / double(pp.k - pp.l));
        run_inf = std::min(run_inf, root);
        const double lo = strict ? root : run_inf;
        if (!(v >= lo - 1e-9 * lo && v <= delta + 1e-9 * delta))
            throw numeric_error("integrate_h: sandwich bound fails at r = " +
                                std::to_string(r));
        const double d = rhs(r, v);
        if (strict && d > 1e-12 * delta)
            throw numeric_error("integrate_h: h' > 0 at r = " +
                                std::to_string(r));
        out.r.push_back(r);
        out.v.push_back(v);
        out.dv.push_back(d);
    }
    return out;
}

SampledProfile integrate_H(double tau, const GEnvelope& env,
                           const ProfileParams& pp, double r_max,
                           int n_nodes) {
    if (!(pp.ratio() < 1.0))
        throw hypothesis_error("integrate_H: requires t_lower_l < t_upper_k");
    const double g1 = env.gunder(1.0);
    const double tp = ipow(tau, pp.k - pp.l);
    if (!(tp > pp.ratio() * g1 && tp < g1))
        throw hypothesis_error(
            "integrate_H: tau^{k-l} must lie strictly inside "
            "(ratio * gunder(1), gunder(1))");
    auto g = [&](double r) { return env.gunder(r); };
    auto rhs = [&](double r, double f) { return profile_rhs(r, f, g, pp); };

    const AugGrid ag = augment_grid(log_grid(1.0, r_max, n_nodes),
                                    env.theta0());
    const std::vector<double> f = rk45_on_grid(rhs, ag.grid, tau, 1e-12,
                                               1e-14);
    quotient_check(ag, f, g, pp, "integrate_H");

    SampledProfile out;
    out.kind = SampledProfile::Kind::Supersolution;
    out.param = tau;
    double prev = -kInf;
    for (std::size_t j = 0; j < ag.base_idx.size(); ++j) {
        const double r = ag.grid[ag.base_idx[j]];
        const double v = f[ag.base_idx[j]];
        const double gv = env.gunder(r);
        const double vp = ipow(v, pp.k - pp.l);
        // Lemma-style sandwich; the upper comparison tolerates one ulp so the
        // tau -> gunder(1)^{1/(k-l)} boundary runs do not trip on rounding.
        if (!(vp > pp.ratio() * gv * (1.0 - 1e-12) &&
              vp < gv * (1.0 + 1e-12)))
            throw numeric_error("integrate_H: sandwich bound fails at r = " +
                                std::to_string(r));
        if (v < prev - 1e-12 * std::abs(prev))
            throw numeric_error("integrate_H: H not nondecreasing at r = " +
                                std::to_string(r));
        prev = v;
        out.r.push_back(r);
        out.v.push_back(v);
        out.dv.push_back(rhs(r, v));
    }
    return out;
}

SampledProfile solve_h0(const GEnvelope& env, const ProfileParams& pp,
                        double r_max, double r_min, int n_nodes) {
    return solve_h0_on(env, pp, log_grid(r_min, r_max, n_nodes));
}

SampledProfile solve_h0_on(const GEnvelope& env, const ProfileParams& pp,
                           const std::vector<double>& r) {
    if (r.size() < 2 || !(r.front() > 0.0))
        throw std::invalid_argument("solve_h0: need a positive grid");
    const double K = pp.K();
    const double e_up = 1.0 / (K * pp.t_upper_k);
    const double r_min = r.front();
    const std::size_t N = r.size();

    std::vector<double> h(N), hn(N), phi(N), I(N);
    for (std::size_t i = 0; i < N; ++i)
        h[i] = std::pow(env.g0(r[i]), 1.0 / double(pp.k - pp.l));

    double diff = kInf;
    std::vector<double> history;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < N; ++i)
            phi[i] = std::pow(r[i], K) * std::pow(h[i], K * pp.t_lower_l);
        // Stieltjes integral int_0^r g0 dphi with g0 frozen at the geometric
        // midpoint of each segment; the (0, r_min] remainder uses phi(0) = 0.
        I[0] = env.g0(0.5 * r_min) * phi[0];
        for (std::size_t i = 1; i < N; ++i)
            I[i] = I[i - 1] +
                   env.g0(std::sqrt(r[i - 1] * r[i])) * (phi[i] - phi[i - 1]);
        diff = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            hn[i] = std::pow(I[i] * std::pow(r[i], -K), e_up);
            diff = std::max(diff, std::abs(hn[i] - h[i]));
        }
        h.swap(hn);
        history.push_back(diff);
        if (diff < 1e-10) break;
    }
    if (!(diff < 1e-10)) {
        std::string msg = "solve_h0: Picard iteration did not converge; "
                          "recent sup-norm differences:";
        const std::size_t from =
            history.size() > 5 ? history.size() - 5 : std::size_t(0);
        for (std::size_t i = from; i < history.size(); ++i)
            msg += " " + std::to_string(history[i]);
        throw numeric_error(msg);
    }

    SampledProfile out;
    out.kind = SampledProfile::Kind::Reference;
    out.param = 0.0;
    out.r = r;
    out.v = h;
    out.dv.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t b = (i + 1 == N) ? i : i + 1;
        out.dv[i] = (h[b] - h[a]) / (r[b] - r[a]);
    }
    return out;
}

double h0_fixed_point_residual(const SampledProfile& h0, const GEnvelope& env,
                               const ProfileParams& pp) {
    const double K = pp.K();
    const double e_up = 1.0 / (K * pp.t_upper_k);
    const std::size_t N = h0.r.size();
    double I = env.g0(0.5 * h0.r[0]) * std::pow(h0.r[0], K) *
               std::pow(h0.v[0], K * pp.t_lower_l);
    double worst =
        std::abs(std::pow(I * std::pow(h0.r[0], -K), e_up) - h0.v[0]);
    double phi_prev = std::pow(h0.r[0], K) * std::pow(h0.v[0], K * pp.t_lower_l);
    for (std::size_t i = 1; i < N; ++i) {
        const double phi =
            std::pow(h0.r[i], K) * std::pow(h0.v[i], K * pp.t_lower_l);
        I += env.g0(std::sqrt(h0.r[i - 1] * h0.r[i])) * (phi - phi_prev);
        phi_prev = phi;
        worst = std::max(
            worst,
            std::abs(std::pow(I * std::pow(h0.r[i], -K), e_up) - h0.v[i]));
    }
    return worst;
}

}  // namespace hq
