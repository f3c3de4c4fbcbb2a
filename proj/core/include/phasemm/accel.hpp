#pragma once

#include <functional>

#include "phasemm/types.hpp"

namespace phasemm {

using StepFn = std::function<ComplexVector(const ComplexVector&)>;
using ObjectiveFn = std::function<double(const ComplexVector&)>;

struct AccelStepResult {
  ComplexVector x;
  int step_evals = 0;   // calls made to the underlying step map
  double alpha = -1.0;  // extrapolation steplength used
  bool fell_back = false;  // candidate rejected, plain double step returned
};

/// One squared-extrapolation step over an MM update map:
///   x1 = S(x), x2 = S(x1), r = x1 - x, v = x2 - x1 - r,
///   alpha = -||r||/||v|| (clamped to <= -1),
///   x' = x - 2 alpha r + alpha^2 v, x'' = S(x').
/// Returns x'' when it does not increase the objective, otherwise falls
/// back to x2, so the descent guarantee of the plain iteration survives.
/// ||v|| = 0 returns x2 directly.
AccelStepResult accelerated_step(const StepFn& step,
                                 const ObjectiveFn& objective,
                                 const ComplexVector& x);

}  // namespace phasemm
