#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailgini {

// A paired loss sample (x_i, y_i), i = 1..n. x is the individual loss
// (arbitrary sign), y the systemic loss. Both sequences must be finite
// and of equal length n >= 2; the constructor enforces this.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;

    PairedSample(std::vector<double> x_in, std::vector<double> y_in);

    std::size_t n() const noexcept { return x.size(); }
};

// Ascending order statistics together with the stable permutation mapping
// sorted position -> original index, so sorted[i] == source[perm[i]].
struct OrderStats {
    std::vector<double> sorted;
    std::vector<std::size_t> source_permutation;
};

OrderStats order_statistics(std::span<const double> v);

// Empirical distribution value F_n(v) = #{i : sample_i <= v} / (n+1).
// The n+1 denominator keeps the value strictly below 1 on the sample range.
double empirical_cdf_value(std::span<const double> sample, double v);

// Precomputed empirical distribution over a fixed sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::span<const double> sample);

    double operator()(double v) const;
    std::size_t n() const noexcept { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

// Number of observations strictly above the (n-k)-th smallest value.
// Equals k when the values near the threshold are distinct; ties at the
// threshold shrink the count because the comparison stays strict.
struct TailSelection {
    double threshold = 0.0;           // Y_{n-k,n}
    std::vector<std::size_t> indices; // i with y_i > threshold
    bool tie_at_threshold = false;    // fewer than k points qualified
};

TailSelection select_tail_by_y(const PairedSample& sample, int k);

// Reference evaluation of the intermediate tail Gini estimator by the
// literal double sum over all pairs i < j:
//
//   (4n / (k^2 (k-1))) * sum_{i<j} (x_i - x_j)(F_{n2}(y_i) - F_{n2}(y_j))
//                        * 1{x_i > 0, x_j > 0, y_i > y_{n-k,n}, y_j > y_{n-k,n}}
//
// O(n^2); intended as the oracle the fast implementation is checked against.
double tail_gini_bruteforce(const PairedSample& sample, int k);

} // namespace tailgini
