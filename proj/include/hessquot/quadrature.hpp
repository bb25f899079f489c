#pragma once

#include <cmath>
#include <vector>

#include "hessquot/common.hpp"

namespace hq {

namespace detail {
// Gauss 7 / Kronrod 15 abscissae and weights on [-1,1].
inline constexpr double gk_x[8] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
    0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
inline constexpr double gk_wg[8] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
    0.0, 0.0, 0.0, 0.0};
inline constexpr double gk_wk[8] = {
    0.209482141084728, 0.190350578064785, 0.140653259715525, 0.063092092629979,
    0.204432940075298, 0.169004726639267, 0.104790010322250, 0.022935322010529};
}  // namespace detail

/// One G7K15 panel on [a,b]; err is the |G7-K15| discrepancy estimate.
template <class F>
double gk15(F&& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double y0 = f(mid);
    double g = detail::gk_wg[0] * y0, k = detail::gk_wk[0] * y0;
    for (int i = 1; i < 8; ++i) {
        double dx = half * detail::gk_x[i];
        double ys = f(mid + dx) + f(mid - dx);
        g += detail::gk_wg[i] * ys;
        k += detail::gk_wk[i] * ys;
    }
    g *= half;
    k *= half;
    err = std::abs(g - k);
    return k;
}

/// Adaptive bisection quadrature on [a,b] to absolute tolerance tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol,
                          int max_depth = 40) {
    struct Seg {
        double a, b, val, err;
        int depth;
    };
    double err0;
    double v0 = gk15(f, a, b, err0);
    std::vector<Seg> stack{{a, b, v0, err0, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.err <= tol * std::max(1.0, (s.b - s.a) / (b - a)) ||
            s.depth >= max_depth) {
            total += s.val;
            continue;
        }
        double m = 0.5 * (s.a + s.b), e1, e2;
        double v1 = gk15(f, s.a, m, e1);
        double v2 = gk15(f, m, s.b, e2);
        stack.push_back({s.a, m, v1, e1, s.depth + 1});
        stack.push_back({m, s.b, v2, e2, s.depth + 1});
    }
    return total;
}

/// Cumulative Simpson antiderivative on a (possibly nonuniform) grid:
/// out[i] = y0 + int_{r[0]}^{r[i]} f, with f evaluated at interval midpoints.
template <class F>
std::vector<double> cumulative_simpson(F&& f, const std::vector<double>& r,
                                       double y0) {
    std::vector<double> out(r.size());
    out[0] = y0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double a = r[i], b = r[i + 1], m = 0.5 * (a + b);
        out[i + 1] = out[i] + (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    return out;
}

/// Trapezoid integral of sampled values (v against x).
inline double trapz(const std::vector<double>& x, const std::vector<double>& v,
                    std::size_t i0, std::size_t i1) {
    double s = 0.0;
    for (std::size_t i = i0; i + 1 <= i1; ++i)
        s += 0.5 * (v[i] + v[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

/// Tail of int_R^inf f assuming f ~ C x^p fitted over sampled (x, f) pairs
/// spanning the last decade. Throws if the fitted decay is too slow to
/// integrate (p >= -1).
struct TailEstimate {
    double value;      // signed tail contribution
    double exponent;   // fitted p
    double error;      // crude error estimate (fit rms propagated)
};

TailEstimate power_tail(const std::vector<double>& x,
                        const std::vector<double>& f, double R);

}  // namespace hq
