#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace phasemm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when a precondition on an argument is violated.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a matrix-vector product vanishes during power iteration.
struct DegenerateMatrix : std::runtime_error {
  int step;
  explicit DegenerateMatrix(int step_index)
      : std::runtime_error("power iteration produced a zero vector at step " +
                           std::to_string(step_index)),
        step(step_index) {}
};

/// Thrown when AA^H is numerically rank deficient.
struct SingularGram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when spectral initialization has no information to work with.
struct DegenerateInit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finite(const ComplexVector& v) {
  return v.real().allFinite() && v.imag().allFinite();
}

}  // namespace phasemm
