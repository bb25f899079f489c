#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hessquot/common.hpp"

namespace hq {

/// Scalar adaptive Cash-Karp RK4(5).
/// Integrates dy/dr = f(r, y) from grid.front() to grid.back() and returns y
/// at every grid node (step size is controlled independently of the grid; the
/// integrator lands exactly on each node).
template <class F>
std::vector<double> rk45_on_grid(F&& f, const std::vector<double>& grid,
                                 double y0, double rel_tol = 1e-10,
                                 double abs_tol = 1e-12) {
    static const double b21 = 1.0 / 5.0;
    static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static const double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
    static const double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0,
                        b54 = 35.0 / 27.0;
    static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                        b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                        b65 = 253.0 / 4096.0;
    static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0,
                        c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
    static const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                        d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                        d6 = c6 - 0.25;

    std::vector<double> out(grid.size());
    out[0] = y0;
    double r = grid[0], y = y0;
    double h = std::max(1e-6, 1e-3 * r);  // 1/r is largest near the left end

    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double r_target = grid[g];
        while (r < r_target) {
            if (r + h > r_target) h = r_target - r;
            const double k1 = f(r, y);
            const double k2 = f(r + b21 * h, y + h * b21 * k1);
            const double k3 = f(r + 0.3 * h, y + h * (b31 * k1 + b32 * k2));
            const double k4 =
                f(r + 0.6 * h, y + h * (b41 * k1 + b42 * k2 + b43 * k3));
            const double k5 =
                f(r + h, y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
            const double k6 =
                f(r + 0.875 * h,
                  y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
            const double dy = h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
            const double err =
                std::abs(h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6));
            const double scale = abs_tol + rel_tol * std::max(std::abs(y),
                                                              std::abs(y + dy));
            if (err <= scale || h <= 1e-14 * std::max(1.0, r)) {
                r += h;
                y += dy;
                double grow = (err > 0.0)
                                  ? 0.9 * std::pow(scale / err, 0.2)
                                  : 5.0;
                h *= std::clamp(grow, 0.2, 5.0);
            } else {
                h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.25));
            }
            if (!std::isfinite(y))
                throw numeric_error("rk45_on_grid: state became non-finite");
        }
        out[g] = y;
    }
    return out;
}

}  // namespace hq
