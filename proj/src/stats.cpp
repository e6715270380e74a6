#include "argox/stats.hpp"

#include <algorithm>
#include <cmath>

#include "argox/errors.hpp"

namespace argox {

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double population_var(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) fail(ErrorKind::InvalidInput, "quantile of empty sample");
    if (p < 0.0 || p > 1.0) fail(ErrorKind::InvalidInput, "quantile p outside [0,1]");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    auto lo = static_cast<size_t>(std::floor(h));
    auto hi = static_cast<size_t>(std::ceil(h));
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::InvalidInput, "pearson on unequal lengths");
    if (x.size() < 2) return 0.0;
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

bool pearson_defined(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return false;
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxx > 0.0 && syy > 0.0;
}

}  // namespace argox
