#include "tailgini/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tailgini/errors.hpp"

namespace tailgini {

void TailConfig::validate(std::size_t n) const {
    const auto check_count = [&](int v, const char* name) {
        if (v < 2 || static_cast<std::size_t>(v) >= n) {
            throw std::invalid_argument(std::string("TailConfig: ") + name +
                                        " must satisfy 2 <= " + name + " < n, got " +
                                        std::to_string(v) + " with n = " + std::to_string(n));
        }
    };
    check_count(k, "k");
    check_count(k1, "k1");
    check_count(k2, "k2");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("TailConfig: p must lie in (0,1), got " + std::to_string(p));
    }
    if (p > static_cast<double>(k) / static_cast<double>(n)) {
        throw std::invalid_argument("TailConfig: p must not exceed k/n (extrapolation goes outward)");
    }
}

double hill_estimate(std::span<const double> x, int k1) {
    const std::size_t n = x.size();
    if (k1 < 2 || static_cast<std::size_t>(k1) >= n) {
        throw std::invalid_argument("hill_estimate: k1 must satisfy 2 <= k1 < n");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double threshold = sorted[n - static_cast<std::size_t>(k1) - 1];
    if (!(threshold > 0.0)) {
        throw std::invalid_argument(
            "hill_estimate: the (k1+1)-th largest observation must be strictly positive; "
            "fewer than k1+1 positive values in the sample");
    }
    const double log_threshold = std::log(threshold);
    double acc = 0.0;
    for (std::size_t i = n - static_cast<std::size_t>(k1); i < n; ++i) {
        acc += std::log(sorted[i]) - log_threshold;
    }
    return acc / static_cast<double>(k1);
}

std::vector<double> transformed_sample(const PairedSample& sample) {
    const std::size_t n = sample.n();
    const EmpiricalCdf f1(sample.x);
    const EmpiricalCdf f2(sample.y);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s1 = 1.0 - f1(sample.x[i]);
        const double s2 = 1.0 - f2(sample.y[i]);
        t[i] = 1.0 / std::max(s1, s2);
    }
    return t;
}

double tail_dependence_eta(const PairedSample& sample, int k2) {
    return hill_estimate(transformed_sample(sample), k2);
}

double tail_gini_from_selection(const PairedSample& sample, const TailSelection& sel, int k) {
    const std::size_t n = sample.n();
    const EmpiricalCdf f2(sample.y);

    // Only pairs with both x strictly positive contribute.
    std::vector<double> xs;
    std::vector<double> fs;
    xs.reserve(sel.indices.size());
    fs.reserve(sel.indices.size());
    for (std::size_t idx : sel.indices) {
        if (sample.x[idx] > 0.0) {
            xs.push_back(sample.x[idx]);
            fs.push_back(f2(sample.y[idx]));
        }
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            sum += (xs[i] - xs[j]) * (fs[i] - fs[j]);
        }
    }
    const double kk = static_cast<double>(k);
    return 4.0 * static_cast<double>(n) / (kk * kk * (kk - 1.0)) * sum;
}

double tail_gini_intermediate(const PairedSample& sample, int k) {
    const TailSelection sel = select_tail_by_y(sample, k);
    return tail_gini_from_selection(sample, sel, k);
}

double extrapolation_exponent(double gamma1, double eta) {
    return 1.0 - 1.0 / eta + gamma1;
}

double extrapolate_tail_gini(double theta_kn, int k, std::size_t n, double p, double gamma1_hat,
                             double eta_hat) {
    if (!(p > 0.0)) throw std::invalid_argument("extrapolate_tail_gini: p must be positive");
    if (p > static_cast<double>(k) / static_cast<double>(n)) {
        throw std::invalid_argument(
            "extrapolate_tail_gini: p exceeds k/n; inward extrapolation is not defined");
    }
    if (!(eta_hat > 0.0)) {
        throw std::invalid_argument("extrapolate_tail_gini: eta_hat must be strictly positive");
    }
    const double d_n = static_cast<double>(k) / (static_cast<double>(n) * p);
    return std::exp(extrapolation_exponent(gamma1_hat, eta_hat) * std::log(d_n)) * theta_kn;
}

double extrapolate_eta_one(double theta_kn, double d_n, double gamma1_hat) {
    if (!(d_n >= 1.0)) throw std::invalid_argument("extrapolate_eta_one: d_n must be >= 1");
    return std::exp(gamma1_hat * std::log(d_n)) * theta_kn;
}

namespace {

template <typename Fn>
auto with_attribution(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(stage) + ": " + e.what());
    } catch (const std::exception& e) {
        throw estimation_error(std::string(stage) + ": " + e.what());
    }
}

} // namespace

TailGiniFit fit_tail_gini(const PairedSample& sample, const TailConfig& config) {
    const std::size_t n = sample.n();
    config.validate(n);

    TailGiniFit fit;
    fit.config = config;

    fit.gamma1_hat = with_attribution("hill gamma1", [&] { return hill_estimate(sample.x, config.k1); });
    fit.eta_hat = with_attribution("tail dependence eta",
                                   [&] { return tail_dependence_eta(sample, config.k2); });

    const TailSelection sel = with_attribution("tail selection", [&] { return select_tail_by_y(sample, config.k); });
    fit.qualifying_points = static_cast<int>(sel.indices.size());
    fit.tie_at_threshold = sel.tie_at_threshold;
    fit.theta_intermediate = with_attribution(
        "intermediate tail Gini", [&] { return tail_gini_from_selection(sample, sel, config.k); });

    fit.d_n = static_cast<double>(config.k) / (static_cast<double>(n) * config.p);
    fit.theta_extreme =
        std::exp(extrapolation_exponent(fit.gamma1_hat, fit.eta_hat) * std::log(fit.d_n)) *
        fit.theta_intermediate;
    fit.theta_baseline = std::exp(fit.gamma1_hat * std::log(fit.d_n)) * fit.theta_intermediate;
    return fit;
}

std::optional<std::string> small_tail_warning(const TailGiniFit& fit, std::size_t n) {
    const double bound = std::pow(static_cast<double>(n), 1.0 - fit.eta_hat);
    if (static_cast<double>(fit.config.k) <= bound) {
        return "tail count k = " + std::to_string(fit.config.k) +
               " does not exceed n^(1 - eta_hat) = " + std::to_string(bound) +
               "; the intermediate level may be too small for a reliable extrapolation";
    }
    return std::nullopt;
}

namespace {

// Adaptive Simpson on [a,b] with absolute tolerance eps.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate_segment(const std::function<double(double)>& f, double a, double b) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double eps = 1e-10 * std::max(1e-30, std::abs(whole));
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 40);
}

// Sums f over dyadic segments moving away from x = 1 in the given
// direction. Stops once contributions fall below the relative tolerance;
// reports divergence when they stop decaying.
double dyadic_sum(const std::function<double(double)>& f, bool upward, double rel_tol,
                  const char* side) {
    constexpr int kMaxSegments = 2048;
    double total = 0.0;
    double prev1 = -1.0, prev2 = -1.0;
    int small_streak = 0;
    int grow_streak = 0;
    for (int j = 0; j < kMaxSegments; ++j) {
        double a, b;
        if (upward) {
            a = std::ldexp(1.0, j);
            b = std::ldexp(1.0, j + 1);
        } else {
            a = std::ldexp(1.0, -(j + 1));
            b = std::ldexp(1.0, -j);
        }
        const double c = integrate_segment(f, a, b);
        if (!std::isfinite(c)) {
            throw estimation_error(std::string("phi0 integral: non-finite contribution on the ") +
                                   side + " side");
        }
        total += c;

        if (std::abs(c) <= rel_tol * std::abs(total) + 1e-300) {
            if (++small_streak >= 2) return total;
        } else {
            small_streak = 0;
        }
        if (j >= 2 && prev1 >= 0.0 && std::abs(c) >= std::abs(prev1) &&
            std::abs(prev1) >= std::abs(prev2)) {
            if (++grow_streak >= 3) {
                throw estimation_error(
                    std::string("phi0 integral diverges: contributions stopped decaying on the ") +
                    side + " side");
            }
        } else {
            grow_streak = 0;
        }
        prev2 = prev1;
        prev1 = c;
    }
    throw estimation_error(std::string("phi0 integral did not converge on the ") + side +
                           " side within the segment budget");
}

} // namespace

LimitConstants phi0_constant(const std::function<double(double)>& tau_at_one, double gamma1,
                             double eta) {
    if (!(gamma1 > 0.0 && gamma1 < 1.0)) {
        throw std::invalid_argument("phi0_constant: gamma1 must lie in (0,1)");
    }
    if (!(eta > 0.5 && eta <= 1.0)) {
        throw std::invalid_argument("phi0_constant: eta must lie in (1/2, 1]");
    }
    const double inv_gamma = 1.0 / gamma1;
    const auto integrand = [&](double x) { return tau_at_one(std::pow(x, -inv_gamma)); };

    constexpr double rel_tol = 1e-8;
    // The upper side is evaluated first: a tau that is too heavy for the
    // extrapolation theory diverges there.
    const double upper = dyadic_sum(integrand, true, rel_tol, "x -> infinity");
    const double lower = dyadic_sum(integrand, false, rel_tol, "x -> 0");

    LimitConstants out;
    const double front = 2.0 * (1.0 + gamma1 - 1.0 / eta) / (1.0 - gamma1 + 1.0 / eta);
    out.phi0 = front * (upper + lower);
    out.integrand = "tau(x^(-1/gamma1), 1) integrated over (0, infinity), split at x = 1";
    return out;
}

} // namespace tailgini
