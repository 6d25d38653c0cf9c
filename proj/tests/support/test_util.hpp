#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "spectralht/errors.hpp"

/// Small comparison helpers shared by the test files.
namespace stht::testing {

inline double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) return 1e300;
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_err(double value, double reference) {
  const double scale = std::abs(reference);
  return std::abs(value - reference) / (scale > 0.0 ? scale : 1.0);
}

inline double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double scale = b.norm();
  return (a - b).norm() / (scale > 0.0 ? scale : 1.0);
}

/// True when fn throws an Error carrying exactly the given code.
inline bool raises(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace stht::testing
