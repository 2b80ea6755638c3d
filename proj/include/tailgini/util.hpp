#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tailgini {

double mean(std::span<const double> v);

// Sample standard deviation (n-1 denominator); requires at least two values.
double sample_sd(std::span<const double> v);

// Median of a copy of the input; the input is not modified.
double median(std::span<const double> v);

// Pearson correlation of two equal-length sequences.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

// Worker count used by parallel_for: the TAILGINI_THREADS environment
// variable when set, otherwise the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, count) across worker threads. Each index is
// processed exactly once; fn must only write to per-index state so that
// results do not depend on the thread layout.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace tailgini
