#pragma once

#include <span>
#include <vector>

#include "tailgini/rng.hpp"
#include "tailgini/sample.hpp"

namespace tailgini {

// Maximum likelihood generalized extreme value fit. For shape != 0 the
// fitted support is {x : 1 + shape*(x - location)/scale > 0}; the optimizer
// rejects parameter sets whose support misses an observation, so a
// converged fit contains all the data.
struct GevFit {
    double location = 0.0;
    double scale = 1.0;
    double shape = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
};

// Derivative-free (Nelder-Mead) maximum likelihood over (location,
// log scale, shape), started from moment-style initializers with several
// shape values; the best converged fit wins. Requires n >= 30 and a
// non-degenerate series.
GevFit fit_gev(std::span<const double> series);

double gev_log_likelihood(const GevFit& fit, std::span<const double> series);
double gev_cdf(const GevFit& fit, double x);
double gev_quantile(const GevFit& fit, double u);

// How a margin was carried to the unit Frechet scale: through the fitted
// GEV distribution function when the fit converges, through the empirical
// distribution (n+1 denominator) otherwise.
struct MarginTransform {
    bool used_gev = false;
    GevFit fit;
};

// u -> -1/log(u) applied to the fitted distribution values; the result is
// a heavy-tailed common scale for both margins.
std::vector<double> to_unit_frechet(std::span<const double> series,
                                    MarginTransform* info = nullptr);

struct TqccValue {
    double statistic = 0.0;
    double threshold = 0.0; // min of the two per-margin empirical 95th percentiles
    int relevant_points = 0; // points with either coordinate above the threshold
};

// Tail quotient correlation of two unit-Frechet margins. With threshold u
// and quotient maxima M+ = max_i (fy_i v u)/(fx_i v u), M- symmetric, the
// statistic is (M+ + M- - 2) / (M+ M- - 1), which lives in (0, 1]: near 0
// for tail-independent data, 1 when all thresholded quotients are equal
// (the comonotone case, taken as the limit value).
TqccValue tqcc_from_frechet(std::span<const double> fx, std::span<const double> fy);

// Fits both margin transforms and evaluates the statistic on a paired sample.
TqccValue tqcc_statistic(const PairedSample& sample, MarginTransform* x_info = nullptr,
                         MarginTransform* y_info = nullptr);

struct IndependenceTestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    double p_value = 1.0;
    int null_replications = 0;
    double level = 0.05;
    bool reject = false; // p_value < level
};

// Permutation test of tail independence: the y margin is permuted
// null_reps times, the statistic recomputed for each permutation, and
// p = (1 + #{null >= observed}) / (null_reps + 1). Margins are transformed
// once; permuting one coordinate leaves both margins unchanged.
IndependenceTestResult tqcc_pvalue(const PairedSample& sample, int null_reps, RngStream& rng,
                                   double level = 0.05);

inline constexpr int kDefaultNullReplications = 999;

} // namespace tailgini
