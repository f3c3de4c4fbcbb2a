#include "phasemm/accel.hpp"

namespace phasemm {

AccelStepResult accelerated_step(const StepFn& step,
                                 const ObjectiveFn& objective,
                                 const ComplexVector& x) {
  AccelStepResult result;
  ComplexVector x1 = step(x);
  ComplexVector x2 = step(x1);
  result.step_evals = 2;

  const ComplexVector r = x1 - x;
  const ComplexVector v = x2 - x1 - r;
  const double rn = r.norm();
  const double vn = v.norm();
  // Degenerate steplength: treat curvature at rounding level as zero.
  if (vn <= 1e-12 * rn || vn == 0.0) {
    result.x = std::move(x2);
    return result;
  }

  double alpha = -rn / vn;
  if (alpha > -1.0) alpha = -1.0;  // |alpha| < 1 would de-accelerate

  const double f_base = objective(x);
  // Monotone steplength backtracking: a rejected candidate halves alpha
  // toward -1 before the plain double step is accepted as the fallback.
  constexpr int kMaxHalvings = 6;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
    const ComplexVector extrapolated =
        x - 2.0 * alpha * r + (alpha * alpha) * v;
    ComplexVector stabilized = step(extrapolated);
    ++result.step_evals;
    if (objective(stabilized) <= f_base) {
      result.alpha = alpha;
      result.x = std::move(stabilized);
      return result;
    }
    if (alpha == -1.0) break;
    alpha = (alpha - 1.0) / 2.0;
    if (alpha > -1.0) alpha = -1.0;
  }
  result.alpha = alpha;
  result.fell_back = true;
  result.x = std::move(x2);
  return result;
}

}  // namespace phasemm
