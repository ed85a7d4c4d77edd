#pragma once

#include <cmath>

#include <Eigen/Core>

namespace qsopt {

/// Von Neumann entropy in bits of a Schmidt spectrum: -sum l^2 log2 l^2, with 0 log 0 = 0.
/// Weights within 1e-12 of one count as exactly one and weights below 1e-16 as
/// zero (SVD round-off), so product states give exactly 0.
template <class Derived>
double von_neumann_entropy(const Eigen::MatrixBase<Derived>& schmidt) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < schmidt.size(); ++i) {
    const double p = static_cast<double>(schmidt(i)) * static_cast<double>(schmidt(i));
    if (p > 1e-16 && std::fabs(1.0 - p) > 1e-12) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace qsopt
