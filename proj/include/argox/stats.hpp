#pragma once

#include <span>
#include <vector>

namespace argox {

double mean(std::span<const double> v);

/// Sample standard deviation (ddof = 1); 0 for fewer than two values.
double sample_std(std::span<const double> v);

/// Population variance (ddof = 0).
double population_var(std::span<const double> v);

/// Linear-interpolation quantile on order statistics: h = (n-1)p,
/// interpolate between floor(h) and ceil(h).
double quantile_type7(std::vector<double> values, double p);

/// Pearson correlation; 0 when either side has zero variance
/// (callers that need "undefined" handle that case explicitly).
double pearson(std::span<const double> x, std::span<const double> y);

bool pearson_defined(std::span<const double> x, std::span<const double> y);

}  // namespace argox
