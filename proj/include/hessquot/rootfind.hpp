#pragma once

#include <cmath>
#include <functional>

#include "hessquot/common.hpp"

namespace hq {

/// Safeguarded Newton on a bracket [lo, hi] with f(lo) <= 0 <= f(hi).
/// Falls back to bisection whenever the Newton step leaves the bracket or
/// the derivative underflows. Converges to |step| <= rel_tol * max(1,|x|).
template <class F, class DF>
double newton_bisect(F f, DF df, double lo, double hi, double rel_tol = 1e-13,
                     int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0 || fhi < 0.0)
        throw numeric_error("newton_bisect: bracket does not straddle a root");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        double d = df(x);
        double step = (d != 0.0) ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisect
        if (std::abs(xn - x) <= rel_tol * std::max(1.0, std::abs(xn))) return xn;
        x = xn;
    }
    return x;
}

/// Plain bisection for monotone scalar maps given by a bracket.
template <class F>
double bisect(F f, double lo, double hi, double tol, int max_iter = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw numeric_error("bisect: no sign change on bracket");
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi), fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace hq
