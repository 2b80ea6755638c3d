#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailgini/sample.hpp"

namespace tailgini {

// Default tail fractions: k = alpha*n for the tail Gini sum, k1 = alpha1*n
// for the tail index of x, k2 = alpha2*n for the dependence exponent.
inline constexpr double kDefaultAlpha = 0.09;
inline constexpr double kDefaultAlpha1 = 0.05;
inline constexpr double kDefaultAlpha2 = 0.05;

// Tail tuning for a fit: tail counts (k, k1, k2) and the extreme level p.
// Extrapolation only goes outward, so p <= k/n is required; the theoretical
// admissible ranges for the tail counts depend on unknown population
// quantities and are not enforced here (see small_tail_warning).
struct TailConfig {
    int k = 0;
    int k1 = 0;
    int k2 = 0;
    double p = 0.0;

    void validate(std::size_t n) const;
};

// Hill estimate of the extreme value index from the top k1 order statistics:
// mean of log x_{n-i+1,n} over i = 1..k1, minus log x_{n-k1,n}.
// Requires the (k1+1)-th largest observation to be strictly positive.
double hill_estimate(std::span<const double> x, int k1);

// t_i = 1 / max(1 - F_{n1}(x_i), 1 - F_{n2}(y_i)) with n+1 denominators in
// the empirical margins; every t_i lies in [1, n+1].
std::vector<double> transformed_sample(const PairedSample& sample);

// Hill estimate applied to the transformed sample: the coefficient of tail
// dependence eta. Values near 1/2 indicate independence, values near 1
// asymptotic dependence.
double tail_dependence_eta(const PairedSample& sample, int k2);

// Fast evaluation of the intermediate tail Gini estimator: selects the
// points with y above the (n-k)-th smallest y and sums only their pairs.
// Agrees with tail_gini_bruteforce to floating tolerance.
double tail_gini_intermediate(const PairedSample& sample, int k);
double tail_gini_from_selection(const PairedSample& sample, const TailSelection& sel, int k);

// Extrapolation from the intermediate level k/n to the extreme level p:
// (k/(np))^(1 - 1/eta + gamma1) * theta_kn, evaluated in log space.
double extrapolate_tail_gini(double theta_kn, int k, std::size_t n, double p, double gamma1_hat,
                             double eta_hat);

// Same extrapolation with the dependence exponent pinned at one,
// i.e. d_n^gamma1 * theta_kn; the baseline the adjusted estimator is
// compared against.
double extrapolate_eta_one(double theta_kn, double d_n, double gamma1_hat);

// The extrapolation exponent 1 - 1/eta + gamma1.
double extrapolation_exponent(double gamma1, double eta);

// Full estimation record for one sample and one tail configuration.
struct TailGiniFit {
    double theta_intermediate = 0.0; // estimate at level k/n
    double gamma1_hat = 0.0;         // Hill estimate of the extreme value index
    double eta_hat = 0.0;            // coefficient of tail dependence estimate
    double d_n = 1.0;                // extrapolation ratio k/(np)
    double theta_extreme = 0.0;      // d_n^(1 - 1/eta_hat + gamma1_hat) * theta_intermediate
    double theta_baseline = 0.0;     // d_n^gamma1_hat * theta_intermediate (eta pinned at 1)
    TailConfig config;
    int qualifying_points = 0;       // points strictly above the y threshold
    bool tie_at_threshold = false;   // fewer than k points qualified
};

// Runs the whole pipeline: Hill, dependence exponent, intermediate tail
// Gini, extrapolation and the eta-one baseline. Deterministic in its inputs;
// constituent failures are rethrown with the failing estimator named.
TailGiniFit fit_tail_gini(const PairedSample& sample, const TailConfig& config);

// Heuristic flag for an intermediate level that looks too small relative to
// the estimated dependence: k <= n^(1 - eta_hat). Advisory only.
std::optional<std::string> small_tail_warning(const TailGiniFit& fit, std::size_t n);

// The constant phi0 = 2(1 + gamma1 - 1/eta) / (1 - gamma1 + 1/eta)
//                     * integral_0^inf tau(x^(-1/gamma1), 1) dx,
// the limit of TG_p / (p^(1/eta - 1) Q1(1-p)) as p -> 0.
struct LimitConstants {
    double phi0 = 0.0;
    std::string integrand; // description of the integrand actually evaluated
};

// Evaluates phi0 by adaptive quadrature over dyadic segments (the segment
// boundary at x = 1 covers the kink of min-type tau functions). Relative
// tolerance 1e-8. A divergent integral (tail contributions that stop
// decaying) is reported as an estimation_error, never as a number.
LimitConstants phi0_constant(const std::function<double(double)>& tau_at_one, double gamma1,
                             double eta);

} // namespace tailgini
