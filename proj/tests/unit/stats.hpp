#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace stats {

/// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi2_crit_99(double k) {
  const double z = 2.326347874;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

inline double chi2(const std::vector<double>& observed, const std::vector<double>& expected) {
  double x = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    x += d * d / expected[i];
  }
  return x;
}

}  // namespace stats
