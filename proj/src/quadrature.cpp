#include "hessquot/quadrature.hpp"

#include <cmath>

namespace hq {

TailEstimate power_tail(const std::vector<double>& x,
                        const std::vector<double>& f, double R) {
    // least-squares fit ln|f| = ln C + p ln x over the last decade before R
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npt = 0;
    double sign = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.1 * R || x[i] > R) continue;
        if (f[i] == 0.0) continue;
        const double lx = std::log(x[i]), ly = std::log(std::abs(f[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        sign += (f[i] > 0.0) ? 1.0 : -1.0;
        ++npt;
    }
    if (npt < 4) return {0.0, 0.0, 0.0};  // nothing left to extrapolate
    const double det = npt * sxx - sx * sx;
    const double p = (npt * sxy - sx * sy) / det;
    const double lnC = (sy * sxx - sx * sxy) / det;
    if (p >= -1.0)
        throw numeric_error(
            "power_tail: integrand decays too slowly (fitted exponent >= -1)");
    const double C = std::exp(lnC) * ((sign >= 0.0) ? 1.0 : -1.0);
    const double tail = -C * std::pow(R, p + 1.0) / (p + 1.0);
    return {tail, p, 0.1 * std::abs(tail)};
}

}  // namespace hq
