#pragma once

namespace tailgini {

// Standard normal distribution function.
double normal_cdf(double x);

// Inverse of normal_cdf for u in (0,1). Rational initial guess refined by
// one Halley step against erfc, accurate to ~1e-15 over the full range.
double normal_quantile(double u);

} // namespace tailgini
