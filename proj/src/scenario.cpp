#include "hessquot/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "hessquot/asymptotics.hpp"
#include "hessquot/radial_engine.hpp"

namespace hq {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

bool log_enabled() {
    const char* v = std::getenv("HESSQUOT_LOG");
    return v != nullptr && v[0] != '\0';
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::fprintf(stderr, "[hessquot] %s\n", msg.c_str());
}

json report_json(const CheckReport& rep) {
    json j;
    j["check"] = rep.check;
    j["n_points"] = rep.n_points;
    j["worst_margin"] = rep.worst_margin;
    j["location"] = rep.location;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    return j;
}

G0Spec parse_g0(const json& j) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return G0Spec::constant(j.value("value", 1.0));
    if (kind == "rational")
        return G0Spec::rational(j.value("limit", 1.0), j.value("amp", 0.0),
                                j.value("power", 1.0));
    if (kind == "tabulated") {
        G0Spec s;
        s.kind = G0Spec::Kind::Tabulated;
        for (const auto& row : j.at("table"))
            s.table.emplace_back(row.at(0).get<double>(),
                                 row.at(1).get<double>());
        return s;
    }
    throw hypothesis_error("envelope.g0.kind: unknown kind '" + kind + "'");
}

struct Loaded {
    json cfg;
    std::string id;
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    fs::path out_dir;
};

}  // namespace

void write_csv(const std::string& path,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
    os.precision(17);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << row[c] << (c + 1 < row.size() ? ',' : '\n');
    }
    if (!os) throw std::ios_base::failure("write failed: " + path);
}

void write_profile_csv(const std::string& path, const SampledProfile& prof,
                       const GEnvelope& env, const ProfileParams& pp) {
    std::vector<std::vector<double>> rows;
    const double inv = 1.0 / double(pp.k - pp.l);
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
        const double r = prof.r[i], v = prof.v[i], dv = prof.dv[i];
        double lo, hi, g;
        switch (prof.kind) {
            case SampledProfile::Kind::Subsolution:
                g = env.gbar(r);
                lo = std::pow(g, inv);
                hi = prof.v.front();
                break;
            case SampledProfile::Kind::Supersolution:
                g = env.gunder(r);
                lo = std::pow(pp.ratio() * g, inv);
                hi = std::pow(g, inv);
                break;
            default:
                g = env.g0(r);
                lo = hi = std::pow(g, inv);
                break;
        }
        // conserved-ratio residual of the driving ODE
        const double res =
            ipow(v, pp.k - pp.l) * (v + pp.t_upper_k * r * dv) -
            g * (v + pp.t_lower_l * r * dv);
        rows.push_back({r, v, dv, lo, hi, res});
    }
    write_csv(path, {"r", "value", "deriv", "bound_low", "bound_high",
                     "residual"},
              rows);
}

namespace {

// ---- individual checks ---------------------------------------------------

CheckReport check_thresholds(const json& cfg, double tol_scale) {
    const auto& p = cfg.at("params");
    HqParams hp(p.at("n"), p.at("k"), p.at("l"), p.at("m"));
    const Thresholds th = thresholds(hp);
    CheckReport rep{"thresholds", 1, kInf, {th.alpha1, th.alpha2},
                    1e-10 * tol_scale, false};
    if (hp.l == 0) {
        const double a2 = double(hp.k) / double(hp.m - hp.k);
        rep.worst_margin = -std::max(std::abs(th.alpha1 + 1.0),
                                     std::abs(th.alpha2 - a2));
    } else if (hp.n == 3 && hp.k == 3 && hp.l == 1) {
        rep.worst_margin = -std::abs(th.alpha1 + 2.0);
    } else {
        rep.worst_margin = 0.0;  // no closed-form oracle; values recorded
    }
    rep.pass = rep.worst_margin >= -rep.tolerance;
    return rep;
}

CheckReport check_radial(const json& cfg, double tol_scale,
                         const fs::path& out) {
    const auto& p = cfg.at("params");
    HqParams hp(p.at("n"), p.at("k"), p.at("l"), p.at("m"));
    const double alpha = cfg.value("alpha", 0.5);
    const double b = cfg.value("b", 1.0);
    const RadialSolution sol =
        radial_profile(alpha, b, hp, log_grid(1.0, 1e3, 2000));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        rows.push_back({sol.r[i], sol.u[i], sol.du[i], sol.U[i],
                        sol.residual[i]});
    write_csv((out / "radial.csv").string(), {"r", "u", "du", "U", "residual"},
              rows);
    CheckReport rep{"radial_residual", int(sol.r.size()), kInf, {alpha},
                    1e-8 * tol_scale, false};
    rep.worst_margin =
        -std::max(sol.max_residual, sol.max_flux_drift * 10.0);
    rep.pass = sol.max_residual <= 1e-8 * tol_scale &&
               sol.max_flux_drift <= 1e-9 * tol_scale;
    return rep;
}

ProfileParams scenario_pp(const json& cfg) {
    const auto& p = cfg.at("params");
    const int n = p.at("n"), k = p.at("k"), l = p.at("l");
    if (!cfg.contains("spectrum") || cfg.at("spectrum").is_string())
        return profile_params(Spectrum::isotropic(n, k, l), k, l);
    std::vector<double> entries =
        cfg.at("spectrum").get<std::vector<double>>();
    return profile_params(Spectrum(entries).normalized_to_akl(k, l), k, l);
}

Spectrum scenario_spectrum(const json& cfg) {
    const auto& p = cfg.at("params");
    const int n = p.at("n"), k = p.at("k"), l = p.at("l");
    if (!cfg.contains("spectrum") || cfg.at("spectrum").is_string())
        return Spectrum::isotropic(n, k, l);
    std::vector<double> entries =
        cfg.at("spectrum").get<std::vector<double>>();
    return Spectrum(entries).normalized_to_akl(k, l);
}

GEnvelope scenario_envelope(const json& cfg) {
    if (!cfg.contains("envelope"))
        return envelope_build(G0Spec::constant(1.0), 0.0, 3.0, 1.0);
    const auto& e = cfg.at("envelope");
    return envelope_build(parse_g0(e.value("g0", json::object())),
                          e.value("C1", 0.0), e.value("beta", 3.0),
                          e.value("theta0", 1.0));
}

std::vector<CheckReport> check_profiles(const json& cfg, double tol_scale,
                                        const fs::path& out) {
    const GEnvelope env = scenario_envelope(cfg);
    const ProfileParams pp = scenario_pp(cfg);
    const double inv = 1.0 / double(pp.k - pp.l);
    const double sup_root = std::pow(env.sup_gbar(), inv);
    const double delta =
        cfg.value("delta", std::max(1.5 * sup_root, sup_root + 0.5));
    const double g1 = env.gunder(1.0);
    const double tau = cfg.value(
        "tau", std::pow(0.5 * (1.0 + pp.ratio()) * g1, inv));

    const SampledProfile h = integrate_h(delta, env, pp, 1e3);
    const SampledProfile H = integrate_H(tau, env, pp, 1e3);
    write_profile_csv((out / "profile_h.csv").string(), h, env, pp);
    write_profile_csv((out / "profile_H.csv").string(), H, env, pp);

    std::vector<CheckReport> reps;
    CheckReport sub{"profile_h_sandwich", int(h.r.size()), kInf, {delta},
                    1e-8 * tol_scale, false};
    for (std::size_t i = 0; i < h.r.size(); ++i) {
        const double lo = std::pow(env.gbar(h.r[i]), inv);
        sub.worst_margin = std::min(
            {sub.worst_margin, h.v[i] - lo, delta - h.v[i], -h.dv[i]});
    }
    sub.pass = sub.worst_margin >= -sub.tolerance;
    reps.push_back(sub);

    CheckReport sup{"profile_H_sandwich", int(H.r.size()), kInf, {tau},
                    1e-8 * tol_scale, false};
    for (std::size_t i = 0; i < H.r.size(); ++i) {
        const double g = env.gunder(H.r[i]);
        const double vp = ipow(H.v[i], pp.k - pp.l);
        sup.worst_margin = std::min(
            {sup.worst_margin, vp - pp.ratio() * g, g - vp, H.dv[i]});
    }
    sup.pass = sup.worst_margin >= -sup.tolerance;
    reps.push_back(sup);
    return reps;
}

CheckReport check_h0(const json& cfg, double tol_scale, const fs::path& out) {
    const GEnvelope env = scenario_envelope(cfg);
    const ProfileParams pp = scenario_pp(cfg);
    const SampledProfile h0 = solve_h0(env, pp, 1e3);
    write_profile_csv((out / "profile_h0.csv").string(), h0, env, pp);
    const double res = h0_fixed_point_residual(h0, env, pp);
    CheckReport rep{"h0_fixed_point", int(h0.r.size()), -res, {},
                    1e-8 * tol_scale, false};
    rep.pass = res <= rep.tolerance;
    return rep;
}

BarrierSpec scenario_barrier_spec(const json& cfg, const GEnvelope& env) {
    const auto& p = cfg.at("params");
    const int k = p.at("k"), l = p.at("l");
    const Spectrum A = scenario_spectrum(cfg);
    const json b = cfg.value("barrier", json::object());
    const ProfileParams pp = profile_params(A, k, l);
    const double inv = 1.0 / double(k - l);
    const double sup_root = std::pow(env.sup_gbar(), inv);
    const double delta =
        b.value("delta", std::max(1.5 * sup_root, sup_root + 0.5));
    const double g1 = env.gunder(1.0);
    const double tau =
        b.value("tau", std::pow(0.5 * (1.0 + pp.ratio()) * g1, inv));
    BoundaryData phi{b.value("phi_c0", 1.0), b.value("phi_q", 0.0)};
    // just above the curvature floor Xi^{k-l} >= sup gbar * max(1, C_n^l/C_n^k);
    // a larger Xi inflates phi_hat in the shell and with it c_tilde and the
    // default envelope constant c
    const double Xi =
        b.value("Xi", 1.1 * std::pow(std::max(env.sup_gbar() *
                                                  binom(A.n(), l) /
                                                  binom(A.n(), k),
                                              env.sup_gbar()),
                                     inv));
    return BarrierSpec(A, k, l, b.value("eta", 1.0), b.value("beta1", 0.0),
                       b.value("beta2", 0.0), delta, tau,
                       b.value("r_omega", 2.0), b.value("r0", 3.0),
                       b.value("R0", 6.0), phi, Xi, env);
}

std::vector<CheckReport> check_barriers(const json& cfg, double tol_scale,
                                        std::uint64_t seed) {
    const GEnvelope env = scenario_envelope(cfg);
    const BarrierSpec spec = scenario_barrier_spec(cfg, env);
    Rng rng(seed);
    const SampledProfile h = integrate_h(spec.delta, env, spec.pp, 2e3);
    const SampledProfile H = integrate_H(spec.tau, env, spec.pp, 2e3);
    std::vector<CheckReport> reps;
    for (auto& r :
         build_subsolution(spec, env, h, rng, 1000, tol_scale).reports)
        reps.push_back(std::move(r));
    for (auto& r :
         build_supersolution(spec, env, H, rng, 1000, tol_scale).reports)
        reps.push_back(std::move(r));
    return reps;
}

std::vector<CheckReport> check_envelope(const json& cfg, double /*tol_scale*/,
                                        std::uint64_t seed) {
    const GEnvelope env = scenario_envelope(cfg);
    const BarrierSpec spec = scenario_barrier_spec(cfg, env);
    BarrierAssembly asm_(spec, env, 2e3, 900, seed, 600);
    const double c =
        cfg.value("c", asm_.c_tilde() + 1.0 + 0.1 * std::abs(asm_.c_tilde()));
    auto pair = asm_.assemble(c);
    auto reps = pair.reports;
    reps.push_back(asm_.verify_quadratic_barrier(
        asm_.on_sphere(asm_.random_direction(), spec.r_omega), 400));
    return reps;
}

CheckReport check_obstruction(const json& cfg, double /*tol_scale*/) {
    const auto& p = cfg.at("params");
    const int k = p.at("k"), l = p.at("l");
    const GEnvelope env = scenario_envelope(cfg);
    const Spectrum A = scenario_spectrum(cfg);
    const ObstructionReport rep = obstruction_check(A, env, k, l);
    CheckReport out{"obstruction", int(rep.per_axis.size()), 0.0,
                    rep.per_axis, 0.0, false};
    if (rep.isotropic) {
        out.worst_margin = -rep.max_residual;
        out.tolerance = 1e-10;
        out.pass = rep.max_residual < 1e-10;
    } else {
        out.worst_margin = rep.max_residual - 1e-6;
        out.tolerance = 0.0;
        out.pass = rep.max_residual > 1e-6;
    }
    return out;
}

CheckReport check_asymptotics(const json& cfg, double /*tol_scale*/,
                              const fs::path& out) {
    const GEnvelope env = scenario_envelope(cfg);
    const ProfileParams pp = scenario_pp(cfg);
    const double K = pp.K();
    const double beta = env.beta();
    const double inv = 1.0 / double(pp.k - pp.l);
    const double delta = std::max(1.5 * std::pow(env.sup_gbar(), inv),
                                  std::pow(env.sup_gbar(), inv) + 0.5);
    const SampledProfile h = integrate_h(delta, env, pp, 2e4, 1400);
    const SampledProfile h0 = solve_h0_on(
        env, pp, [&] {
            std::vector<double> g = log_grid(1e-3, 1.0, 250);
            g.pop_back();
            const auto t = log_grid(1.0, 2e4, 1400);
            g.insert(g.end(), t.begin(), t.end());
            return g;
        }());
    const std::vector<double> e = profile_remainder(h, h0);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < h.r.size(); ++i)
        rows.push_back({h.r[i], e[i]});
    write_csv((out / "remainder.csv").string(), {"r", "e"}, rows);

    const bool borderline = std::abs(beta - K) < 1e-6;
    const DecayFit fit =
        fit_decay(h.r, e, 20.0, 800.0, borderline, delta);
    CheckReport rep{"asymptotics_decay", fit.n_used, kInf,
                    {fit.slope, fit.log_factor ? 1.0 : 0.0}, 0.15, false};
    if (fit.underflow) {
        rep.worst_margin = 0.0;
        rep.pass = true;
    } else if (borderline) {
        rep.worst_margin = 0.9 - fit.rms_logpower /
                                     std::max(fit.rms_power, 1e-300);
        rep.pass = fit.log_factor;
    } else {
        const double expect = 2.0 - std::min(beta, K);
        rep.worst_margin = 0.15 - std::abs(fit.slope - expect);
        rep.pass = rep.worst_margin >= 0.0;
    }
    return rep;
}

Loaded load_config(const std::string& path, long long seed_override,
                   const std::string& out_override,
                   double tol_scale_override) {
    std::ifstream is(path);
    if (!is) throw std::ios_base::failure("cannot open config: " + path);
    Loaded L;
    L.cfg = json::parse(is);
    if (L.cfg.value("schema", 0) != 1)
        throw hypothesis_error("config field 'schema' must be 1");
    L.id = L.cfg.value("id", "scenario");
    L.seed = L.cfg.value("seed", std::uint64_t(0));
    L.tol_scale = L.cfg.value("tol_scale", 1.0);
    L.out_dir = L.cfg.value("output_dir", std::string("out")) ;
    if (seed_override >= 0) L.seed = std::uint64_t(seed_override);
    if (!out_override.empty()) L.out_dir = out_override;
    if (tol_scale_override > 0.0) L.tol_scale = tol_scale_override;
    if (L.cfg.value("tol_scale", 1.0) <= 0.0)
        throw hypothesis_error("config field 'tol_scale' must be positive");
    return L;
}

}  // namespace

int run_scenario(const std::string& config_path, long long seed_override,
                 const std::string& out_override,
                 double tol_scale_override) {
    Loaded L;
    try {
        L = load_config(config_path, seed_override, out_override,
                        tol_scale_override);
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    json checks = json::array();
    json timing = json::array();
    bool all_pass = true;
    try {
        fs::create_directories(L.out_dir);
        std::vector<std::string> names =
            L.cfg.value("checks", std::vector<std::string>{"thresholds"});
        for (const std::string& name : names) {
            log_line("check: " + name);
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<CheckReport> reps;
            if (name == "thresholds")
                reps.push_back(check_thresholds(L.cfg, L.tol_scale));
            else if (name == "radial")
                reps.push_back(check_radial(L.cfg, L.tol_scale, L.out_dir));
            else if (name == "profiles")
                reps = check_profiles(L.cfg, L.tol_scale, L.out_dir);
            else if (name == "h0")
                reps.push_back(check_h0(L.cfg, L.tol_scale, L.out_dir));
            else if (name == "barriers")
                reps = check_barriers(L.cfg, L.tol_scale, L.seed);
            else if (name == "envelope")
                reps = check_envelope(L.cfg, L.tol_scale, L.seed);
            else if (name == "obstruction")
                reps.push_back(check_obstruction(L.cfg, L.tol_scale));
            else if (name == "asymptotics")
                reps.push_back(
                    check_asymptotics(L.cfg, L.tol_scale, L.out_dir));
            else
                throw hypothesis_error("checks: unknown check '" + name +
                                       "'");
            const auto t1 = std::chrono::steady_clock::now();
            for (const auto& r : reps) {
                checks.push_back(report_json(r));
                all_pass = all_pass && r.pass;
            }
            timing.push_back(
                {{"check", name},
                 {"seconds",
                  std::chrono::duration<double>(t1 - t0).count()}});
        }
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const hypothesis_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    }

    json report;
    report["schema"] = 1;
    report["id"] = L.id;
    report["seed"] = L.seed;
    report["tol_scale"] = L.tol_scale;
    report["checks"] = checks;
    report["pass"] = all_pass;
    try {
        std::ofstream os(L.out_dir / "report.json");
        os << report.dump(2) << '\n';
        if (!os) throw std::ios_base::failure("write failed");
        std::ofstream ts(L.out_dir / "timing.json");
        ts << json{{"timings", timing}}.dump(2) << '\n';
    } catch (const std::exception& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    return all_pass ? kExitPass : kExitCheckFail;
}

}  // namespace hq
