#include "phasemm/solvers.hpp"

#include <chrono>
#include <cmath>

#include "phasemm/accel.hpp"

namespace phasemm {

namespace {

Complex guarded_phase(Complex z, double eps) {
  const double m = std::abs(z);
  return m < eps ? Complex(1.0, 0.0) : z / m;
}

// Funnels the inner-loop cap through the acceleration wrapper; translated
// into SolveStatus::Failed by solve_from.
struct BacktrackDiverged : std::runtime_error {
  BacktrackDiverged() : std::runtime_error("backtracking-diverged") {}
};

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (cfg.rel_tol < 0.0) throw InvalidArgument("rel_tol must be >= 0");
  if (cfg.epsilon_guard <= 0.0)
    throw InvalidArgument("epsilon_guard must be > 0");
  if (cfg.power_steps < 1) throw InvalidArgument("power_steps must be >= 1");
  if (cfg.e_initial <= 0.0) throw InvalidArgument("E_initial must be > 0");
  if (cfg.d_strategy == DStrategy::Fixed && cfg.fixed_d <= 0.0)
    throw InvalidArgument("fixed D must be > 0");
}

double majorizer_power_with_W(const ProblemInstance& P,
                              const ComplexVector& candidate,
                              const ComplexVector& anchor,
                              const ComplexMatrix& W, double D, double E) {
  const double na = anchor.norm();
  if (na == 0.0)
    throw InvalidArgument("eval_majorizer_power: anchor must be nonzero");
  const double nx = candidate.norm();
  const ComplexVector v = W * anchor + E * anchor;  // (W + E I) x^k
  const double cross = std::real(candidate.dot(v));
  const double anchor_quad = std::real(anchor.dot(v));
  const ComplexVector z = P.ensemble.matrix.adjoint() * anchor;
  const double quartic = z.cwiseAbs2().squaredNorm();
  const double y_sq = P.measurements.values.squaredNorm();
  const double nx2 = nx * nx;
  const double na2 = na * na;
  return D * nx2 * nx2 + 2.0 * D * E * nx2 - 4.0 * D * (nx / na) * cross +
         2.0 * D * (nx2 / na2) * anchor_quad + D * na2 * na2 - quartic + y_sq;
}

}  // namespace

double native_objective(const ProblemInstance& P, const ComplexVector& x,
                        Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::WirtingerFlow:
    case Algorithm::Power:
    case Algorithm::PowerBacktracking:
      return objective_squared(P, x);
    default:
      return objective_modulus(P, x);
  }
}

WirtingerStep step_wirtinger_flow(const ProblemInstance& P,
                                  const ComplexVector& x,
                                  const SolverConfig& cfg, int iter,
                                  double lambda_squared) {
  const ComplexVector g = gradient_squared(P, x);
  const double mu0 =
      lambda_squared *
      std::min(1.0 - std::exp(-(static_cast<double>(iter) + 1.0) / 330.0),
               0.4);
  if (cfg.wf_step == WfStepRule::Heuristic) return {x - mu0 * g, false};

  const double fx = objective_squared(P, x);
  const double gn2 = g.squaredNorm();
  double mu = mu0;
  for (int halving = 0; halving <= 50; ++halving) {
    ComplexVector candidate = x - mu * g;
    if (objective_squared(P, candidate) <= fx - 0.5 * mu * gn2)
      return {std::move(candidate), false};
    mu *= 0.5;
  }
  return {x, true};
}

ComplexVector step_gerchberg_saxton(const ProblemInstance& P,
                                    const ComplexVector& x,
                                    double epsilon_guard) {
  const ComplexVector z = P.ensemble.matrix.adjoint() * x;
  ComplexVector b(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    b[i] = guarded_phase(z[i], epsilon_guard) *
           std::sqrt(P.measurements.values[i]);
  return gram_solve(P.ensemble, b);
}

ComplexVector step_modulus_single_term(const ProblemInstance& P,
                                       const ComplexVector& x,
                                       double epsilon_guard) {
  // c_i = sqrt(y_i) phase(a_i^H x): the scaled phase estimate, which makes
  // the surrogate a plain least-squares problem in x.
  const ComplexVector z = P.ensemble.matrix.adjoint() * x;
  ComplexVector c(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    c[i] = std::sqrt(P.measurements.values[i]) *
           guarded_phase(z[i], epsilon_guard);
  return gram_solve(P.ensemble, c);
}

ComplexVector step_modulus_both_terms(const ProblemInstance& P,
                                      const ComplexVector& x,
                                      double epsilon_guard) {
  const ComplexVector z = P.ensemble.matrix.adjoint() * x;
  ComplexVector p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    p[i] = std::sqrt(P.measurements.values[i]) *
           guarded_phase(z[i], epsilon_guard);
  const ComplexVector s = P.ensemble.matrix * p;
  const ComplexVector t = P.ensemble.matrix * z;  // AA^H x
  return x + (s - t) / lambda_max_gram(P.ensemble);
}

ComplexMatrix build_W(const ProblemInstance& P, const ComplexVector& x,
                      double D) {
  if (D <= 0.0) throw InvalidArgument("build_W: D must be > 0");
  if (x.size() != P.K()) throw InvalidArgument("build_W: dimension mismatch");
  const ComplexVector z = P.ensemble.matrix.adjoint() * x;
  const RealVector intensities = z.cwiseAbs2();
  ComplexMatrix W = x * x.adjoint();
  W.noalias() += (1.0 / D) * (P.B() - P.ensemble.matrix *
                                          intensities.cast<Complex>()
                                              .asDiagonal() *
                                          P.ensemble.matrix.adjoint());
  return W;
}

Lemma2Bound lemma2_bound(const ProblemInstance& P, const ComplexVector& x) {
  const double nx2 = x.squaredNorm();
  if (nx2 == 0.0) throw InvalidArgument("lemma2_bound: x must be nonzero");
  const ComplexVector z = P.ensemble.matrix.adjoint() * x;
  const RealVector intensities = z.cwiseAbs2();
  const RealVector col_norms = P.ensemble.matrix.colwise().squaredNorm();
  double raw = 0.0;
  for (Eigen::Index i = 0; i < intensities.size(); ++i) {
    const double r = intensities[i] - P.measurements.values[i];
    if (r > 0.0) raw += r * col_norms[i] / nx2;  // i in the violation set
    raw += r * intensities[i] / (nx2 * nx2);
  }
  return {std::max(raw, 0.0), raw};
}

double resolve_step_D(const ProblemInstance& P, const ComplexVector& x,
                      const SolverConfig& cfg) {
  switch (cfg.d_strategy) {
    case DStrategy::LambdaMaxPhi:
      return lambda_max_phi(P.ensemble);
    case DStrategy::Lemma2Bound: {
      const double floor = lambda_max_phi(P.ensemble) * 1e-6;
      return 1.01 * std::max(lemma2_bound(P, x).value, floor);
    }
    case DStrategy::Fixed:
      if (cfg.fixed_d <= 0.0) throw InvalidArgument("fixed D must be > 0");
      return cfg.fixed_d;
  }
  throw InvalidArgument("unknown D strategy");
}

ComplexVector step_power(const ProblemInstance& P, const ComplexVector& x,
                         const SolverConfig& cfg) {
  const double D = resolve_step_D(P, x, cfg);
  const ComplexMatrix W = build_W(P, x, D);
  ComplexVector start = x;
  if (start.norm() == 0.0)
    start = ComplexVector::Constant(P.K(), Complex(1.0, 0.0));
  const EigPair eig = power_iteration(W, cfg.power_steps, start);
  const double t = std::max(0.0, eig.value);
  return std::sqrt(t) * eig.vector;
}

PowerBacktrackStep step_power_backtracking(const ProblemInstance& P,
                                           const ComplexVector& x,
                                           const SolverConfig& cfg) {
  const double nx = x.norm();
  if (nx == 0.0)
    throw InvalidArgument("step_power_backtracking: zero iterate");
  const double D = resolve_step_D(P, x, cfg);
  const ComplexMatrix W = build_W(P, x, D);
  const ComplexVector xt = x / nx;

  double E = cfg.e_initial;
  constexpr int kMaxPasses = 60;  // E overflow guard
  for (int pass = 1; pass <= kMaxPasses; ++pass) {
    E *= 2.0;
    const ComplexVector d = W * xt + E * xt;
    const double dn = d.norm();
    if (dn == 0.0 || !std::isfinite(dn)) continue;  // failed pass, retry
    const ComplexVector u = d / dn;
    const double rho = std::real(u.dot(W * u));
    const double t = std::max(0.0, rho);
    ComplexVector candidate = std::sqrt(t) * u;
    const double g = majorizer_power_with_W(P, candidate, x, W, D, E);
    const double f = objective_squared(P, candidate);
    // Rounding slack: g and f cancel O(D ||x||^4) terms near fixed points.
    if (g >= f - 1e-10 * (1.0 + std::abs(f) + std::abs(g)))
      return {std::move(candidate), pass, E, false};
  }
  return {x, kMaxPasses, E, true};
}

double eval_majorizer_power(const ProblemInstance& P,
                            const ComplexVector& candidate,
                            const ComplexVector& anchor, double D, double E) {
  if (anchor.norm() == 0.0)
    throw InvalidArgument("eval_majorizer_power: anchor must be nonzero");
  const ComplexMatrix W = build_W(P, anchor, D);
  return majorizer_power_with_W(P, candidate, anchor, W, D, E);
}

double eval_majorizer_modulus(const ProblemInstance& P,
                              const ComplexVector& candidate,
                              const ComplexVector& anchor,
                              double epsilon_guard) {
  const ComplexVector zc = P.ensemble.matrix.adjoint() * candidate;
  const ComplexVector za = P.ensemble.matrix.adjoint() * anchor;
  double g = zc.cwiseAbs2().sum() + P.measurements.values.sum();
  for (Eigen::Index i = 0; i < zc.size(); ++i) {
    const Complex phase = guarded_phase(za[i], epsilon_guard);
    g -= 2.0 * std::sqrt(P.measurements.values[i]) *
         std::real(zc[i] * std::conj(phase));
  }
  return g;
}

SolverRun solve_from(const ProblemInstance& P, const SolverConfig& cfg,
                     ComplexVector x0, const IterCallback& on_iterate) {
  validate_config(cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const Algorithm alg = cfg.algorithm;

  SolverRun run;
  double lambda_sq = 0.0;
  if (alg == Algorithm::WirtingerFlow) {
    const double lambda = init_scale(P).lambda;
    lambda_sq = lambda * lambda;
  }

  ComplexVector x = std::move(x0);
  double f = native_objective(P, x, alg);
  run.objective_trace.reserve(cfg.max_iters + 1);
  run.objective_trace.push_back(f);
  if (on_iterate) on_iterate(0, x, f);

  auto plain_step = [&](const ComplexVector& xc) -> ComplexVector {
    ++run.step_evals;
    switch (alg) {
      case Algorithm::GerchbergSaxton:
        return step_gerchberg_saxton(P, xc, cfg.epsilon_guard);
      case Algorithm::ModulusSingleTerm:
        return step_modulus_single_term(P, xc, cfg.epsilon_guard);
      case Algorithm::ModulusBothTerms:
        return step_modulus_both_terms(P, xc, cfg.epsilon_guard);
      case Algorithm::Power:
        return step_power(P, xc, cfg);
      case Algorithm::PowerBacktracking: {
        PowerBacktrackStep s = step_power_backtracking(P, xc, cfg);
        run.inner_loop_counts.push_back(s.inner_count);
        if (s.diverged) throw BacktrackDiverged();
        return std::move(s.x);
      }
      default:
        throw InvalidArgument("not an MM update map");
    }
  };
  auto family_objective = [&](const ComplexVector& xc) {
    return native_objective(P, xc, alg);
  };

  // Acceleration applies to the fixed-point MM maps only; the Wirtinger
  // Flow gradient step runs plain.
  const bool accelerated =
      cfg.accelerate && alg != Algorithm::WirtingerFlow;

  try {
    for (int k = 0; k < cfg.max_iters; ++k) {
      ComplexVector x_next;
      if (alg == Algorithm::WirtingerFlow) {
        ++run.step_evals;
        x_next = step_wirtinger_flow(P, x, cfg, k, lambda_sq).x;
      } else if (accelerated) {
        x_next = accelerated_step(plain_step, family_objective, x).x;
      } else {
        x_next = plain_step(x);
      }
      const double f_next = family_objective(x_next);
      x = std::move(x_next);
      run.objective_trace.push_back(f_next);
      if (on_iterate) on_iterate(k + 1, x, f_next);
      const bool stop = std::abs(f - f_next) <= cfg.rel_tol * (1.0 + f);
      f = f_next;
      if (stop) {
        run.status = SolveStatus::Converged;
        break;
      }
    }
  } catch (const BacktrackDiverged& e) {
    run.status = SolveStatus::Failed;
    run.failure_reason = e.what();
  }

  run.final_x = std::move(x);
  run.iterations_used = static_cast<int>(run.objective_trace.size()) - 1;
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return run;
}

SolverRun solve(const ProblemInstance& P, const SolverConfig& cfg,
                const IterCallback& on_iterate) {
  const auto t_start = std::chrono::steady_clock::now();
  SolverRun run =
      solve_from(P, cfg, spectral_init(P, cfg.resolved_init_scale()),
                 on_iterate);
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return run;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::WirtingerFlow: return "wf";
    case Algorithm::GerchbergSaxton: return "gs";
    case Algorithm::ModulusSingleTerm: return "modulus-single";
    case Algorithm::ModulusBothTerms: return "modulus-both";
    case Algorithm::Power: return "power";
    case Algorithm::PowerBacktracking: return "power-bt";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "wf" || name == "wirtinger-flow") return Algorithm::WirtingerFlow;
  if (name == "gs" || name == "gerchberg-saxton")
    return Algorithm::GerchbergSaxton;
  if (name == "modulus-single") return Algorithm::ModulusSingleTerm;
  if (name == "modulus-both") return Algorithm::ModulusBothTerms;
  if (name == "power") return Algorithm::Power;
  if (name == "power-bt" || name == "power-backtracking")
    return Algorithm::PowerBacktracking;
  return std::nullopt;
}

}  // namespace phasemm
