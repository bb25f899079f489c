#include "hessquot/symmetric_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hq {

std::vector<double> elem_sym_all(std::span<const double> a) {
    const std::size_t n = a.size();
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = std::min(i + 1, n); j >= 1; --j)
            e[j] += a[i] * e[j - 1];
    return e;
}

double elem_sym(std::span<const double> a, int j) {
    const int n = static_cast<int>(a.size());
    if (j < 0 || j > n)
        throw std::out_of_range("elem_sym: order " + std::to_string(j) +
                                " outside [0, " + std::to_string(n) + "]");
    return elem_sym_all(a)[j];
}

Spectrum::Spectrum(std::vector<double> entries) : a_(std::move(entries)) {
    if (a_.empty()) throw std::invalid_argument("Spectrum: empty");
    for (double v : a_)
        if (!(v > 0.0))
            throw std::invalid_argument("Spectrum: entries must be positive");
    std::sort(a_.begin(), a_.end());
}

bool Spectrum::in_akl(int k, int l, double tol) const {
    return std::abs(sigma(k) / sigma(l) - 1.0) <= tol;
}

Spectrum Spectrum::normalized_to_akl(int k, int l) const {
    if (!(0 <= l && l < k && k <= n()))
        throw std::invalid_argument("normalized_to_akl: need 0 <= l < k <= n");
    const double s = std::pow(sigma(l) / sigma(k), 1.0 / double(k - l));
    std::vector<double> b = a_;
    for (double& v : b) v *= s;
    return Spectrum(std::move(b));
}

Spectrum Spectrum::isotropic(int n, int k, int l) {
    const double a_hat =
        std::pow(binom(n, l) / binom(n, k), 1.0 / double(k - l));
    return Spectrum(std::vector<double>(std::size_t(n), a_hat));
}

double elem_sym_excluding(const Spectrum& a, int j,
                          std::span<const int> excluded) {
    const int n = a.n();
    if (j < 0 || j > n)
        throw std::out_of_range("elem_sym_excluding: order out of range");
    std::vector<bool> drop(std::size_t(n), false);
    for (int i : excluded) {
        if (i < 0 || i >= n)
            throw std::out_of_range("elem_sym_excluding: index out of range");
        drop[std::size_t(i)] = true;
    }
    std::vector<double> kept;
    kept.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i)
        if (!drop[std::size_t(i)]) kept.push_back(a[i]);
    if (j > static_cast<int>(kept.size())) return 0.0;
    return elem_sym(kept, j);
}

std::vector<std::vector<double>> exclusion_table(const Spectrum& a) {
    const int n = a.n();
    std::vector<std::vector<double>> tab;
    tab.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> kept;
        kept.reserve(std::size_t(n - 1));
        for (int m = 0; m < n; ++m)
            if (m != i) kept.push_back(a[m]);
        auto e = elem_sym_all(kept);
        e.resize(std::size_t(n) + 1, 0.0);  // sigma_{n;i} = 0
        tab[std::size_t(i)] = std::move(e);
    }
    return tab;
}

double lambda_ratio(const Spectrum& a, std::span<const double> x, int j) {
    const int n = a.n();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("lambda_ratio: dimension mismatch");
    if (j < 1 || j > n) throw std::out_of_range("lambda_ratio: order");
    double xnorm2 = 0.0;
    for (double xi : x) xnorm2 += xi * xi;
    if (xnorm2 == 0.0)
        throw std::invalid_argument("lambda_ratio: degenerate direction x = 0");
    const auto tab = exclusion_table(a);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = x[std::size_t(i)] * x[std::size_t(i)];
        num += tab[std::size_t(i)][std::size_t(j - 1)] * a[i] * a[i] * w;
        den += a[i] * w;
    }
    return num / (a.sigma(j) * den);
}

TBounds t_bounds(const Spectrum& a, int j) {
    const int n = a.n();
    if (j < 0 || j > n) throw std::out_of_range("t_bounds: order");
    if (j == 0) return {0.0, 0.0, 0};
    const auto tab = exclusion_table(a);
    const double sj = a.sigma(j);
    double hi = -1.0, lo = 2.0;
    for (int i = 0; i < n; ++i) {
        const double v = a[i] * tab[std::size_t(i)][std::size_t(j - 1)] / sj;
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return {hi, lo, j};
}

double rank_one_sigma(std::span<const double> p, std::span<const double> q,
                      double s, int k) {
    const int n = static_cast<int>(p.size());
    if (static_cast<int>(q.size()) != n)
        throw std::invalid_argument("rank_one_sigma: dimension mismatch");
    if (k < 0 || k > n) throw std::out_of_range("rank_one_sigma: order");
    if (k == 0) return 1.0;
    double acc = elem_sym(p, k);
    if (s != 0.0) {
        std::vector<double> reduced(std::size_t(n - 1), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int m = 0, w = 0; m < n; ++m)
                if (m != i) reduced[std::size_t(w++)] = p[std::size_t(m)];
            acc += s * elem_sym(reduced, k - 1) * q[std::size_t(i)] *
                   q[std::size_t(i)];
        }
    }
    return acc;
}

double radial_hessian_sigma(double u1, double u2, double r, int j, int n) {
    if (!(r > 0.0))
        throw std::domain_error("radial_hessian_sigma: radius must be positive");
    if (j < 0 || j > n) throw std::out_of_range("radial_hessian_sigma: order");
    if (j == 0) return 1.0;
    const double g = u1 / r;  // the repeated eigenvalue u'/r
    return binom(n - 1, j - 1) * u2 * ipow(g, j - 1) + binom(n - 1, j) * ipow(g, j);
}

}  // namespace hq
