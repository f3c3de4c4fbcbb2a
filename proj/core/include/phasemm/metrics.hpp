#pragma once

#include <optional>

#include "phasemm/types.hpp"

namespace phasemm {

enum class RecoverySetting { GaussianDirect, DFTAutocorr };

struct RecoveryReport {
  double phase_shift_phi = 0.0;
  double aligned_squared_error = 0.0;
  bool success = false;
  double threshold = 0.0;  // threshold behind the success flag
  std::optional<double> autocorr_squared_error;
  std::optional<bool> autocorr_success;
  std::optional<double> autocorr_threshold;
};

/// Zero-padded autocorrelation r_m = sum_i x_i conj(x_{i-m}) for
/// m = -(K-1) .. K-1, stored at index m + K - 1. Conjugate symmetric with
/// r_0 = ||x||^2.
struct Autocorrelation {
  ComplexVector values;
  int K = 0;

  Complex at(int m) const { return values[m + K - 1]; }
};

/// phi = arg(x_o^H x_star), the global phase minimizing
/// ||x_star - x_o e^{j phi}||^2. Returns 0 when the inner product is
/// (numerically) zero, where every phi is a minimizer.
double align_phase(const ComplexVector& x_star, const ComplexVector& x_o);

double aligned_squared_error(const ComplexVector& x_star,
                             const ComplexVector& x_o);

Autocorrelation autocorrelation(const ComplexVector& x);

/// GaussianDirect: success iff the phase-aligned squared error beats the
/// threshold. DFTAutocorr: additionally compares autocorrelations, which is
/// the only identifiable target under Fourier-magnitude measurements.
RecoveryReport classify(const ComplexVector& x_star, const ComplexVector& x_o,
                        RecoverySetting setting, double threshold = 1e-4,
                        double autocorr_threshold = 1e-8);

}  // namespace phasemm
