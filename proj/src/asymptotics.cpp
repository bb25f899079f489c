#include "hessquot/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "hessquot/quadrature.hpp"

namespace hq {

namespace {

struct Fit2 {
    double intercept, slope, rms;
};

// least squares of y against 1 and x, with an optional fixed offset term
Fit2 ls_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    Fit2 f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - f.intercept - f.slope * x[i];
        ss += d * d;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& e,
                   double r_lo, double r_hi, bool try_log, double scale) {
    DecayFit out;
    out.r_lo = r_lo;
    out.r_hi = r_hi;
    const double floor = 1e-13 * std::max(scale, 1e-300);
    std::vector<double> lx, ly, llog;
    int in_window = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < r_lo || r[i] > r_hi) continue;
        ++in_window;
        if (std::abs(e[i]) < floor) continue;
        lx.push_back(std::log(r[i]));
        ly.push_back(std::log(std::abs(e[i])));
        llog.push_back(std::log(std::log(r[i])));
    }
    out.n_used = int(lx.size());
    if (in_window > 0 && out.n_used < in_window / 2) {
        out.underflow = true;  // remainder too small to fit; treated as pass
        return out;
    }
    if (out.n_used < 20 || lx.back() - lx.front() < 1.5 * std::log(10.0))
        throw hypothesis_error(
            "fit_decay: need >= 20 nodes spanning >= 1.5 decades in window");

    const Fit2 pw = ls_fit(lx, ly);
    out.slope = pw.slope;
    out.rms = out.rms_power = pw.rms;
    if (try_log) {
        // model ln|e| = a + p ln r + ln ln r  (unit ln r factor)
        std::vector<double> yl(ly.size());
        for (std::size_t i = 0; i < ly.size(); ++i) yl[i] = ly[i] - llog[i];
        const Fit2 lg = ls_fit(lx, yl);
        out.rms_logpower = lg.rms;
        const double ratio = lg.rms / std::max(pw.rms, 1e-300);
        if (ratio < 0.9) {
            out.log_factor = true;
            out.slope = lg.slope;
            out.rms = lg.rms;
        } else if (ratio <= 1.1) {
            out.inconclusive = true;  // wider window suggested
        }
    }
    return out;
}

std::vector<double> profile_remainder(const SampledProfile& f,
                                      const SampledProfile& h0) {
    const std::size_t N = f.r.size();
    auto h0_at = [&](double r) {
        auto it = std::lower_bound(h0.r.begin(), h0.r.end(), r);
        if (it != h0.r.end() && std::abs(*it - r) <= 1e-12 * r)
            return h0.v[std::size_t(it - h0.r.begin())];
        if (it != h0.r.begin() && std::abs(*(it - 1) - r) <= 1e-12 * r)
            return h0.v[std::size_t(it - 1 - h0.r.begin())];
        return h0.value_at(r);
    };
    std::vector<double> integrand(N);
    for (std::size_t i = 0; i < N; ++i)
        integrand[i] = f.r[i] * (f.v[i] - h0_at(f.r[i]));

    // tail beyond the grid (zero when the integrand has underflowed)
    const double R = f.r.back();
    std::vector<double> xs, es;
    double emax = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        scale = std::max(scale, std::abs(f.v[i]));
        if (f.r[i] < 0.1 * R) continue;
        xs.push_back(f.r[i]);
        es.push_back(integrand[i]);
        emax = std::max(emax, std::abs(integrand[i]) / f.r[i]);
    }
    double tail = 0.0;
    if (emax >= 1e-12 * scale) tail = power_tail(xs, es, R).value;

    // e(r_i) = -(int_{r_i}^R theta (f - h0) + tail), accumulated from the top
    std::vector<double> e(N);
    e[N - 1] = -tail;
    for (std::size_t i = N - 1; i > 0; --i)
        e[i - 1] = e[i] - 0.5 * (integrand[i - 1] + integrand[i]) *
                              (f.r[i] - f.r[i - 1]);
    return e;
}

DecayFit borderline_probe(const std::vector<double>& r,
                          const std::vector<double>& e, double r_lo,
                          double r_hi, double scale) {
    return fit_decay(r, e, r_lo, r_hi, /*try_log=*/true, scale);
}

}  // namespace hq
