#pragma once

#include <vector>

#include "hessquot/common.hpp"
#include "hessquot/profiles.hpp"

namespace hq {

struct DecayFit {
    double slope = 0.0;       // fitted log-log exponent of |e| vs r
    bool log_factor = false;  // ln r correction model preferred
    double r_lo = 0.0, r_hi = 0.0;
    double rms = 0.0;          // rms of the winning model
    double rms_power = 0.0;    // pure power model
    double rms_logpower = 0.0; // power times ln r model (when fitted)
    bool underflow = false;    // samples below floor; treated as a pass
    bool inconclusive = false; // rms ratio in [0.9, 1.1] for the log probe
    int n_used = 0;
};

/// Least-squares slope of ln|e| against ln r over [r_lo, r_hi]. Nodes with
/// |e| below 1e-13 * scale are dropped; when (nearly) all are dropped the
/// fit reports underflow instead of failing. With try_log set, a model with
/// a fixed ln r factor is fitted too and the lower-rms model wins.
DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& e,
                   double r_lo = 50.0, double r_hi = 2000.0,
                   bool try_log = false, double scale = 1.0);

/// Remainder of the profile's far-field expansion at each node of f:
/// e(r) = -int_r^inf theta (f - h0), with the beyond-grid part fitted as a
/// power tail. Shared nodes of f and h0 are matched exactly.
std::vector<double> profile_remainder(const SampledProfile& f,
                                      const SampledProfile& h0);

/// Borderline beta = K probe: fits the remainder both ways and reports
/// whether the log-corrected model wins (rms ratio < 0.9).
DecayFit borderline_probe(const std::vector<double>& r,
                          const std::vector<double>& e, double r_lo = 50.0,
                          double r_hi = 2000.0, double scale = 1.0);

}  // namespace hq
