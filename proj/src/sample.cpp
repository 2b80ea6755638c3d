#include "tailgini/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailgini {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry at index " +
                                        std::to_string(i));
        }
    }
}

} // namespace

PairedSample::PairedSample(std::vector<double> x_in, std::vector<double> y_in)
    : x(std::move(x_in)), y(std::move(y_in)) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("PairedSample: x and y lengths differ");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("PairedSample: need at least two observations");
    }
    require_finite(x, "PairedSample x");
    require_finite(y, "PairedSample y");
}

OrderStats order_statistics(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("order_statistics: empty input");
    require_finite(v, "order_statistics");
    OrderStats os;
    os.source_permutation.resize(v.size());
    std::iota(os.source_permutation.begin(), os.source_permutation.end(), std::size_t{0});
    std::stable_sort(os.source_permutation.begin(), os.source_permutation.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    os.sorted.reserve(v.size());
    for (std::size_t idx : os.source_permutation) os.sorted.push_back(v[idx]);
    return os;
}

double empirical_cdf_value(std::span<const double> sample, double v) {
    if (sample.empty()) throw std::invalid_argument("empirical_cdf_value: empty sample");
    require_finite(sample, "empirical_cdf_value");
    if (!std::isfinite(v)) throw std::invalid_argument("empirical_cdf_value: non-finite v");
    std::size_t count = 0;
    for (double s : sample) {
        if (s <= v) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(sample.size() + 1);
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample)
    : sorted_(sample.begin(), sample.end()) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    require_finite(sorted_, "EmpiricalCdf");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double v) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
    const auto count = static_cast<double>(std::distance(sorted_.begin(), it));
    return count / static_cast<double>(sorted_.size() + 1);
}

TailSelection select_tail_by_y(const PairedSample& sample, int k) {
    const std::size_t n = sample.n();
    if (k < 2 || static_cast<std::size_t>(k) >= n) {
        throw std::invalid_argument("select_tail_by_y: k must satisfy 2 <= k < n");
    }
    std::vector<double> ys = sample.y;
    std::nth_element(ys.begin(), ys.begin() + (n - static_cast<std::size_t>(k) - 1), ys.end());
    TailSelection sel;
    sel.threshold = ys[n - static_cast<std::size_t>(k) - 1];
    for (std::size_t i = 0; i < n; ++i) {
        if (sample.y[i] > sel.threshold) sel.indices.push_back(i);
    }
    sel.tie_at_threshold = sel.indices.size() < static_cast<std::size_t>(k);
    return sel;
}

double tail_gini_bruteforce(const PairedSample& sample, int k) {
    const std::size_t n = sample.n();
    if (k < 2 || static_cast<std::size_t>(k) >= n) {
        throw std::invalid_argument("tail_gini_bruteforce: k must satisfy 2 <= k < n");
    }
    std::vector<double> ys = sample.y;
    std::sort(ys.begin(), ys.end());
    const double threshold = ys[n - static_cast<std::size_t>(k) - 1];

    const EmpiricalCdf f2(sample.y);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sample.x[i] > 0.0 && sample.x[j] > 0.0 && sample.y[i] > threshold &&
                sample.y[j] > threshold) {
                sum += (sample.x[i] - sample.x[j]) * (f2(sample.y[i]) - f2(sample.y[j]));
            }
        }
    }
    const double kk = static_cast<double>(k);
    return 4.0 * static_cast<double>(n) / (kk * kk * (kk - 1.0)) * sum;
}

} // namespace tailgini
