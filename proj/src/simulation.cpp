#include "tailgini/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tailgini/errors.hpp"
#include "tailgini/normal.hpp"
#include "tailgini/util.hpp"

namespace tailgini {

void SimModel::validate() const {
    if (!(a1 > 0.0 && a1 < 1.0)) {
        throw std::invalid_argument("SimModel: a1 must lie in (0,1)");
    }
    if (variant == ModelVariant::model1) {
        if (!(a2 > 0.5 * a1 && a2 < a1)) {
            throw std::invalid_argument("SimModel: Model 1 requires a1/2 < a2 < a1");
        }
    } else {
        if (!(a2 > 0.0 && a2 < 1.0)) {
            throw std::invalid_argument("SimModel: Model 2 requires a2 in (0,1)");
        }
    }
}

double SimModel::eta() const {
    return variant == ModelVariant::model1 ? a2 / a1 : 0.5 * (1.0 + a2);
}

double TauFunction::operator()(double x, double y) const {
    if (model.variant == ModelVariant::model1) {
        const double c = model.a1 / model.a2;
        return std::exp2(c - 1.0) * std::pow(std::min(x, y), c);
    }
    return std::pow(x * y, 1.0 / (1.0 + model.a2));
}

std::function<double(double)> TauFunction::at_one() const {
    return [tau = *this](double x) { return tau(x, 1.0); };
}

double pareto_from_uniform(double u, double a) {
    return std::pow(u, -a);
}

std::vector<double> sample_pareto(double a, std::size_t n, RngStream& rng) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("sample_pareto: a must lie in (0,1)");
    std::vector<double> out(n);
    for (auto& v : out) v = pareto_from_uniform(rng.next_uniform(), a);
    return out;
}

PairedSample sample_model1(const SimModel& model, std::size_t n, RngStream& rng) {
    model.validate();
    if (model.variant != ModelVariant::model1) {
        throw std::invalid_argument("sample_model1: model is not a Model 1 parameterization");
    }
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Fixed draw order keeps the stream layout independent of b.
        const double z1 = pareto_from_uniform(rng.next_uniform(), model.a1);
        const double z2 = pareto_from_uniform(rng.next_uniform(), model.a2);
        const double z3 = pareto_from_uniform(rng.next_uniform(), model.a1);
        const bool b = rng.next_uniform() < 0.5;
        if (b) {
            x[i] = z1;
            y[i] = z3;
        } else {
            x[i] = z2;
            y[i] = z2;
        }
    }
    return PairedSample(std::move(x), std::move(y));
}

PairedSample sample_model2(const SimModel& model, std::size_t n, RngStream& rng) {
    model.validate();
    if (model.variant != ModelVariant::model2) {
        throw std::invalid_argument("sample_model2: model is not a Model 2 parameterization");
    }
    const double rho = model.a2;
    const double comp = std::sqrt(1.0 - rho * rho);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_normal();
        const double v = rho * u + comp * rng.next_normal();
        // 1 - Phi(u) evaluated as Phi(-u) to stay accurate in the far tail.
        x[i] = std::pow(normal_cdf(-u), -model.a1);
        y[i] = v;
    }
    return PairedSample(std::move(x), std::move(y));
}

PairedSample sample_model(const SimModel& model, std::size_t n, RngStream& rng) {
    return model.variant == ModelVariant::model1 ? sample_model1(model, n, rng)
                                                 : sample_model2(model, n, rng);
}

namespace {

double pareto_mixture_cdf(double v, double a1, double a2) {
    if (v <= 1.0) return 0.0;
    return 0.5 * (1.0 - std::pow(v, -1.0 / a1)) + 0.5 * (1.0 - std::pow(v, -1.0 / a2));
}

} // namespace

double true_f1(const SimModel& model, double x) {
    if (model.variant == ModelVariant::model1) {
        return pareto_mixture_cdf(x, model.a1, model.a2);
    }
    if (x <= 1.0) return 0.0;
    return 1.0 - std::pow(x, -1.0 / model.a1);
}

double true_f2(const SimModel& model, double y) {
    if (model.variant == ModelVariant::model1) {
        return pareto_mixture_cdf(y, model.a1, model.a2);
    }
    return normal_cdf(y);
}

double true_q1(const SimModel& model, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("true_q1: u must lie in [0,1)");
    if (model.variant == ModelVariant::model2) {
        if (u == 0.0) return 1.0;
        return std::pow(1.0 - u, -model.a1);
    }
    if (u == 0.0) return 1.0;
    // Bisection on the mixture distribution function, monotone in x.
    double lo = 1.0;
    double hi = 2.0;
    while (pareto_mixture_cdf(hi, model.a1, model.a2) < u) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pareto_mixture_cdf(mid, model.a1, model.a2) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double tail_gini_tail_covariance(std::span<const double> x, std::span<const double> f2y,
                                 double p) {
    if (x.size() != f2y.size() || x.size() < 2) {
        throw std::invalid_argument("tail_gini_tail_covariance: need >= 2 paired tail points");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("tail_gini_tail_covariance: p must lie in (0,1)");
    }
    const double mx = mean(x);
    const double mf = mean(f2y);
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (f2y[i] - mf);
    }
    cov /= static_cast<double>(x.size() - 1);
    return 4.0 / p * cov;
}

TrueValueEstimate true_tg_oracle(const SimModel& model, double p, int reps, int size,
                                 std::uint64_t seed, std::uint64_t stream_base) {
    model.validate();
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("true_tg_oracle: p must lie in (0,1)");
    if (reps < 1) throw std::invalid_argument("true_tg_oracle: reps must be >= 1");
    if (p * static_cast<double>(size) < 100.0) {
        throw std::invalid_argument(
            "true_tg_oracle: p * size must be at least 100 so each replication sees enough "
            "tail points");
    }

    std::vector<double> values(static_cast<std::size_t>(reps),
                               std::numeric_limits<double>::quiet_NaN());
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        RngStream rng(seed, stream_base + r);
        const PairedSample sample = sample_model(model, static_cast<std::size_t>(size), rng);
        std::vector<double> tail_x, tail_f;
        for (std::size_t i = 0; i < sample.n(); ++i) {
            const double f = true_f2(model, sample.y[i]);
            if (f > 1.0 - p) {
                tail_x.push_back(sample.x[i]);
                tail_f.push_back(f);
            }
        }
        if (tail_x.size() >= 2) {
            values[r] = tail_gini_tail_covariance(tail_x, tail_f, p);
        }
    });

    TrueValueEstimate est;
    std::vector<double> kept;
    kept.reserve(values.size());
    for (double v : values) {
        if (std::isnan(v)) {
            ++est.replications_excluded;
        } else {
            kept.push_back(v);
        }
    }
    if (kept.empty()) {
        throw estimation_error("true_tg_oracle: every replication was excluded for lack of "
                               "tail points");
    }
    est.replications_used = static_cast<int>(kept.size());
    est.value = median(kept);
    return est;
}

const std::vector<ModelPreset>& model_presets() {
    static const std::vector<ModelPreset> presets = {
        {"model1a", {ModelVariant::model1, 0.35, 0.30}, 0.183, 0.5835, 0.8965},
        {"model1b", {ModelVariant::model1, 0.40, 0.35}, 0.251, 1.0923, 1.9283},
        {"model1c", {ModelVariant::model1, 0.60, 0.50}, 0.100, 4.2418, 10.9131},
        {"model1d", {ModelVariant::model1, 0.50, 0.40}, 0.300, 1.3009, 2.1104},
        {"model2", {ModelVariant::model2, 0.60, 0.90}, 0.547, 24.6808, 84.0422},
    };
    return presets;
}

const ModelPreset* find_preset(const std::string& name) {
    for (const auto& preset : model_presets()) {
        if (preset.name == name) return &preset;
    }
    return nullptr;
}

bool exponent_matches_tabulated(const ModelPreset& preset) {
    const double computed = 1.0 - 1.0 / preset.model.eta() + preset.model.gamma1();
    return std::abs(computed - preset.tabulated_exponent) < 5e-4;
}

} // namespace tailgini
