#include "phasemm/metrics.hpp"

#include <cmath>

namespace phasemm {

double align_phase(const ComplexVector& x_star, const ComplexVector& x_o) {
  if (x_star.size() != x_o.size())
    throw InvalidArgument("align_phase: length mismatch");
  const Complex ip = x_o.dot(x_star);  // x_o^H x_star
  if (std::abs(ip) < 1e-15) return 0.0;  // h is constant in phi
  return std::arg(ip);
}

double aligned_squared_error(const ComplexVector& x_star,
                             const ComplexVector& x_o) {
  const double phi = align_phase(x_star, x_o);
  return (x_star - x_o * std::polar(1.0, phi)).squaredNorm();
}

Autocorrelation autocorrelation(const ComplexVector& x) {
  const int K = static_cast<int>(x.size());
  Autocorrelation r;
  r.K = K;
  r.values = ComplexVector::Zero(2 * K - 1);
  for (int m = 0; m < K; ++m) {
    Complex acc(0.0, 0.0);
    for (int i = m; i < K; ++i) acc += x[i] * std::conj(x[i - m]);
    r.values[K - 1 + m] = acc;
    if (m > 0) r.values[K - 1 - m] = std::conj(acc);
  }
  return r;
}

RecoveryReport classify(const ComplexVector& x_star, const ComplexVector& x_o,
                        RecoverySetting setting, double threshold,
                        double autocorr_threshold) {
  RecoveryReport report;
  report.phase_shift_phi = align_phase(x_star, x_o);
  report.aligned_squared_error =
      (x_star - x_o * std::polar(1.0, report.phase_shift_phi)).squaredNorm();
  report.threshold = threshold;
  report.success = report.aligned_squared_error < threshold;
  if (setting == RecoverySetting::DFTAutocorr) {
    const Autocorrelation r_star = autocorrelation(x_star);
    const Autocorrelation r_o = autocorrelation(x_o);
    const double err = (r_o.values - r_star.values).squaredNorm();
    report.autocorr_squared_error = err;
    report.autocorr_threshold = autocorr_threshold;
    report.autocorr_success = err < autocorr_threshold;
  }
  return report;
}

}  // namespace phasemm
