#pragma once

#include <span>
#include <vector>

#include "hessquot/common.hpp"

namespace hq {

/// All elementary symmetric functions e_0..e_n of the entries, by the prefix
/// recurrence e_j <- e_j + a_i e_{j-1} (stable for positive inputs).
std::vector<double> elem_sym_all(std::span<const double> a);

/// sigma_j(a); j out of [0, n] raises std::out_of_range.
double elem_sym(std::span<const double> a, int j);

/// Positive sorted spectrum of a diagonal matrix A = diag(a).
class Spectrum {
  public:
    explicit Spectrum(std::vector<double> entries);

    int n() const { return static_cast<int>(a_.size()); }
    double operator[](int i) const { return a_[i]; }
    const std::vector<double>& entries() const { return a_; }

    double sigma(int j) const { return elem_sym(a_, j); }

    /// Membership in the constraint set sigma_k/sigma_l = 1.
    bool in_akl(int k, int l, double tol = 1e-12) const;

    /// Rescale s*a so that sigma_k/sigma_l = 1 (possible for any positive a).
    Spectrum normalized_to_akl(int k, int l) const;

    /// Isotropic spectrum a_i = a_hat(n,k,l), the member of A_{k,l} whose
    /// quadratic is an exact radial solution.
    static Spectrum isotropic(int n, int k, int l);

  private:
    std::vector<double> a_;
};

/// sigma_j of the spectrum with the listed entries zeroed out.
double elem_sym_excluding(const Spectrum& a, int j,
                          std::span<const int> excluded);

/// Table s[i][j] = sigma_{j;i}(a) for i = 0..n-1, j = 0..n; used by the
/// barrier verifier hot loop.
std::vector<std::vector<double>> exclusion_table(const Spectrum& a);

/// Directional ratio Lambda_j(a, x); degree-0 homogeneous in x.
double lambda_ratio(const Spectrum& a, std::span<const double> x, int j);

struct TBounds {
    double t_upper;  // sup over directions of Lambda_j
    double t_lower;  // inf over directions of Lambda_j
    int order;
};

/// Closed-form sup/inf of Lambda_j over directions: Lambda_j is a ratio of
/// linear forms in w_i = x_i^2 >= 0, so both extrema sit at coordinate axes.
TBounds t_bounds(const Spectrum& a, int j);

/// sigma_k of eigenvalues of diag(p) + s q q^T without eigendecomposition.
double rank_one_sigma(std::span<const double> p, std::span<const double> q,
                      double s, int k);

/// sigma_j of the radial Hessian spectrum (u'', u'/r, ..., u'/r) in dim n.
double radial_hessian_sigma(double u1, double u2, double r, int j, int n);

}  // namespace hq
