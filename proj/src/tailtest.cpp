#include "tailgini/tailtest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "tailgini/errors.hpp"
#include "tailgini/estimators.hpp"
#include "tailgini/util.hpp"

namespace tailgini {

namespace {

constexpr double kGumbelShapeCutoff = 1e-8;
constexpr double kEulerMascheroni = 0.5772156649015329;

double negative_log_likelihood(std::span<const double> series, double location, double log_scale,
                               double shape) {
    const double scale = std::exp(log_scale);
    const std::size_t n = series.size();
    double nll = static_cast<double>(n) * log_scale;
    if (std::abs(shape) < kGumbelShapeCutoff) {
        for (double x : series) {
            const double z = (x - location) / scale;
            nll += z + std::exp(-z);
        }
        return nll;
    }
    const double inv_shape = 1.0 / shape;
    for (double x : series) {
        const double arg = 1.0 + shape * (x - location) / scale;
        if (arg <= 0.0) return std::numeric_limits<double>::infinity();
        const double log_arg = std::log(arg);
        nll += (1.0 + inv_shape) * log_arg + std::exp(-inv_shape * log_arg);
    }
    return nll;
}

struct SimplexPoint {
    std::array<double, 3> x;
    double f;
};

// Nelder-Mead on three parameters; returns the best point found.
SimplexPoint nelder_mead(const std::function<double(const std::array<double, 3>&)>& f,
                         std::array<double, 3> start, std::array<double, 3> step, int max_iter) {
    std::array<SimplexPoint, 4> s;
    s[0] = {start, f(start)};
    for (int i = 0; i < 3; ++i) {
        auto x = start;
        x[i] += step[i];
        s[i + 1] = {x, f(x)};
    }
    const auto by_value = [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; };
    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(), by_value);
        if (std::isfinite(s[3].f) && s[3].f - s[0].f < 1e-10 * (1.0 + std::abs(s[0].f))) break;

        std::array<double, 3> centroid{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) centroid[j] += s[i].x[j] / 3.0;
        }
        const auto combine = [&](double t) {
            std::array<double, 3> x;
            for (int j = 0; j < 3; ++j) x[j] = centroid[j] + t * (s[3].x[j] - centroid[j]);
            return x;
        };

        const auto reflected = combine(-1.0);
        const double fr = f(reflected);
        if (fr < s[0].f) {
            const auto expanded = combine(-2.0);
            const double fe = f(expanded);
            s[3] = fe < fr ? SimplexPoint{expanded, fe} : SimplexPoint{reflected, fr};
            continue;
        }
        if (fr < s[2].f) {
            s[3] = {reflected, fr};
            continue;
        }
        const auto contracted = combine(fr < s[3].f ? -0.5 : 0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, s[3].f)) {
            s[3] = {contracted, fc};
            continue;
        }
        for (int i = 1; i < 4; ++i) {
            for (int j = 0; j < 3; ++j) s[i].x[j] = 0.5 * (s[i].x[j] + s[0].x[j]);
            s[i].f = f(s[i].x);
        }
    }
    std::sort(s.begin(), s.end(), by_value);
    return s[0];
}

} // namespace

GevFit fit_gev(std::span<const double> series) {
    if (series.size() < 30) {
        throw std::invalid_argument("fit_gev: need at least 30 observations");
    }
    const double m = mean(series);
    const double sd = sample_sd(series);
    if (!(sd > 0.0)) {
        throw std::invalid_argument("fit_gev: series is constant, the scale degenerates");
    }

    const auto objective = [&](const std::array<double, 3>& x) {
        return negative_log_likelihood(series, x[0], x[1], x[2]);
    };

    // Gumbel moment initializer, explored from several shape starts.
    const double scale0 = sd * std::sqrt(6.0) / M_PI;
    const double loc0 = m - kEulerMascheroni * scale0;
    const double log_scale0 = std::log(scale0);

    SimplexPoint best{{loc0, log_scale0, 0.0}, std::numeric_limits<double>::infinity()};
    for (double shape0 : {0.01, 0.15, -0.15, 0.4, -0.4}) {
        const SimplexPoint candidate = nelder_mead(
            objective, {loc0, log_scale0, shape0}, {0.2 * scale0, 0.25, 0.2}, 600);
        if (candidate.f < best.f) best = candidate;
    }
    if (!std::isfinite(best.f)) {
        throw estimation_error("fit_gev: no start converged to a finite likelihood");
    }

    GevFit fit;
    fit.location = best.x[0];
    fit.scale = std::exp(best.x[1]);
    fit.shape = best.x[2];
    fit.log_likelihood = -best.f;
    fit.converged = true;
    if (std::abs(fit.shape) >= kGumbelShapeCutoff) {
        for (double x : series) {
            if (1.0 + fit.shape * (x - fit.location) / fit.scale <= 0.0) {
                fit.converged = false;
                break;
            }
        }
    }
    if (!fit.converged) {
        throw estimation_error("fit_gev: best fit does not contain every observation");
    }
    return fit;
}

double gev_log_likelihood(const GevFit& fit, std::span<const double> series) {
    return -negative_log_likelihood(series, fit.location, std::log(fit.scale), fit.shape);
}

double gev_cdf(const GevFit& fit, double x) {
    const double z = (x - fit.location) / fit.scale;
    if (std::abs(fit.shape) < kGumbelShapeCutoff) {
        return std::exp(-std::exp(-z));
    }
    const double arg = 1.0 + fit.shape * z;
    if (arg <= 0.0) return fit.shape > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(arg, -1.0 / fit.shape));
}

double gev_quantile(const GevFit& fit, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("gev_quantile: u must lie in (0,1)");
    const double w = -std::log(u);
    if (std::abs(fit.shape) < kGumbelShapeCutoff) {
        return fit.location - fit.scale * std::log(w);
    }
    return fit.location + fit.scale * (std::pow(w, -fit.shape) - 1.0) / fit.shape;
}

std::vector<double> to_unit_frechet(std::span<const double> series, MarginTransform* info) {
    MarginTransform transform;
    std::vector<double> probs(series.size());
    try {
        transform.fit = fit_gev(series);
        transform.used_gev = true;
        for (std::size_t i = 0; i < series.size(); ++i) {
            probs[i] = gev_cdf(transform.fit, series[i]);
        }
    } catch (const std::exception&) {
        // Rank fallback: the empirical distribution with n+1 denominator
        // keeps every probability inside (0,1).
        transform.used_gev = false;
        const EmpiricalCdf cdf(series);
        for (std::size_t i = 0; i < series.size(); ++i) probs[i] = cdf(series[i]);
    }
    std::vector<double> frechet(series.size());
    constexpr double eps = 1e-12;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double u = std::clamp(probs[i], eps, 1.0 - eps);
        frechet[i] = -1.0 / std::log(u);
    }
    if (info) *info = transform;
    return frechet;
}

namespace {

double empirical_percentile_95(std::span<const double> v) {
    std::vector<double> c(v.begin(), v.end());
    // Upper empirical percentile without interpolation: smallest value with
    // at least 95% of the sample at or below it.
    const std::size_t idx =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(c.size()))) - 1;
    std::nth_element(c.begin(), c.begin() + idx, c.end());
    return c[idx];
}

} // namespace

TqccValue tqcc_from_frechet(std::span<const double> fx, std::span<const double> fy) {
    if (fx.size() != fy.size() || fx.size() < 20) {
        throw std::invalid_argument("tqcc_from_frechet: need paired margins with n >= 20");
    }
    TqccValue out;
    out.threshold = std::min(empirical_percentile_95(fx), empirical_percentile_95(fy));

    double max_yx = 1.0;
    double max_xy = 1.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
        const double cx = std::max(fx[i], out.threshold);
        const double cy = std::max(fy[i], out.threshold);
        if (fx[i] > out.threshold || fy[i] > out.threshold) ++out.relevant_points;
        max_yx = std::max(max_yx, cy / cx);
        max_xy = std::max(max_xy, cx / cy);
    }
    if (out.relevant_points < 10) {
        throw std::invalid_argument(
            "tqcc_from_frechet: fewer than 10 points above the threshold");
    }
    const double product = max_yx * max_xy;
    out.statistic = product > 1.0 ? (max_yx + max_xy - 2.0) / (product - 1.0) : 1.0;
    return out;
}

TqccValue tqcc_statistic(const PairedSample& sample, MarginTransform* x_info,
                         MarginTransform* y_info) {
    const auto fx = to_unit_frechet(sample.x, x_info);
    const auto fy = to_unit_frechet(sample.y, y_info);
    return tqcc_from_frechet(fx, fy);
}

IndependenceTestResult tqcc_pvalue(const PairedSample& sample, int null_reps, RngStream& rng,
                                   double level) {
    if (null_reps < 200) {
        throw std::invalid_argument("tqcc_pvalue: need at least 200 null replications");
    }
    const auto fx = to_unit_frechet(sample.x);
    const auto fy = to_unit_frechet(sample.y);
    const TqccValue observed = tqcc_from_frechet(fx, fy);

    // Each null replication owns a stream derived from the caller's rng, so
    // the p-value is a deterministic function of (data, seed, null_reps) and
    // replications run in parallel.
    const std::size_t n = fx.size();
    const std::uint64_t null_seed = rng.next_u64();
    std::vector<std::uint8_t> at_least(static_cast<std::size_t>(null_reps), 0);
    parallel_for(static_cast<std::size_t>(null_reps), [&](std::size_t r) {
        RngStream stream(null_seed, r);
        std::vector<double> permuted = fy;
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(permuted[i], permuted[stream.next_below(i + 1)]);
        }
        const TqccValue null_value = tqcc_from_frechet(fx, permuted);
        at_least[r] = null_value.statistic >= observed.statistic ? 1 : 0;
    });

    int count = 0;
    for (std::uint8_t c : at_least) count += c;

    IndependenceTestResult result;
    result.statistic = observed.statistic;
    result.threshold = observed.threshold;
    result.null_replications = null_reps;
    result.p_value = static_cast<double>(1 + count) / static_cast<double>(null_reps + 1);
    result.level = level;
    result.reject = result.p_value < level;
    return result;
}

} // namespace tailgini
