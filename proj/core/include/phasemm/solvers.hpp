#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasemm/linalg.hpp"
#include "phasemm/problem.hpp"
#include "phasemm/types.hpp"

namespace phasemm {

enum class Algorithm {
  WirtingerFlow,
  GerchbergSaxton,
  ModulusSingleTerm,
  ModulusBothTerms,
  Power,
  PowerBacktracking,
};

/// Majorization constant for the Power family.
enum class DStrategy {
  LambdaMaxPhi,  // D = lambda_max(Phi), the safe default
  Lemma2Bound,   // per-iteration D just above the sign-condition bound
  Fixed,         // user-supplied constant (fixed_d)
};

enum class WfStepRule { Heuristic, Backtracking };

struct SolverConfig {
  Algorithm algorithm = Algorithm::Power;
  int max_iters = 200;
  double rel_tol = 1e-10;
  double epsilon_guard = 1e-12;  // phase guard for |a_i^H x| near zero
  int power_steps = 1;
  DStrategy d_strategy = DStrategy::LambdaMaxPhi;
  double fixed_d = 0.0;  // used when d_strategy == Fixed
  WfStepRule wf_step = WfStepRule::Heuristic;
  double e_initial = 0.5;
  bool accelerate = false;
  // Wirtinger Flow scales the spectral start by lambda; the others do not,
  // unless overridden here.
  std::optional<bool> apply_init_scale;

  bool resolved_init_scale() const {
    return apply_init_scale.value_or(algorithm == Algorithm::WirtingerFlow);
  }
};

enum class SolveStatus { Converged, MaxIters, Failed };

struct SolverRun {
  ComplexVector final_x;
  // Native objective per iteration (index 0 = initialization): the squared
  // formulation for WirtingerFlow/Power/PowerBacktracking, the modulus
  // formulation for the others.
  std::vector<double> objective_trace;
  int iterations_used = 0;
  SolveStatus status = SolveStatus::MaxIters;
  std::string failure_reason;
  double wall_time_s = 0.0;
  std::vector<int> inner_loop_counts;  // PowerBacktracking only
  long step_evals = 0;  // underlying step-map calls (acceleration bookkeeping)
};

/// Called after the initialization (iter 0) and after every outer iteration.
using IterCallback =
    std::function<void(int iter, const ComplexVector& x, double objective)>;

double native_objective(const ProblemInstance& P, const ComplexVector& x,
                        Algorithm algorithm);

/// Runs the configured algorithm from the spectral initialization.
SolverRun solve(const ProblemInstance& P, const SolverConfig& cfg,
                const IterCallback& on_iterate = {});

/// Runs from an explicit starting iterate.
SolverRun solve_from(const ProblemInstance& P, const SolverConfig& cfg,
                     ComplexVector x0, const IterCallback& on_iterate = {});

// --- single update steps --------------------------------------------------

struct WirtingerStep {
  ComplexVector x;
  bool stalled = false;  // backtracking exhausted; x is unchanged
};

/// One gradient step. Heuristic rule: mu = lambda^2 min(1 - e^{-(k+1)/330},
/// 0.4). Backtracking rule: halve mu from the heuristic value until the
/// Armijo condition f(x - mu g) <= f(x) - (mu/2)||g||^2 holds (<= 50 halvings).
WirtingerStep step_wirtinger_flow(const ProblemInstance& P,
                                  const ComplexVector& x,
                                  const SolverConfig& cfg, int iter,
                                  double lambda_squared);

/// Phase projection followed by the Gram least-squares solve.
ComplexVector step_gerchberg_saxton(const ProblemInstance& P,
                                    const ComplexVector& x,
                                    double epsilon_guard = 1e-12);

/// Single-term modulus update c_i = sqrt(y_i) phase(a_i^H x); algebraically
/// the Gerchberg-Saxton update, kept as a separate entry point so the
/// equivalence can be asserted.
ComplexVector step_modulus_single_term(const ProblemInstance& P,
                                       const ComplexVector& x,
                                       double epsilon_guard = 1e-12);

/// Both-terms modulus update
///   x + lambda_max(AA^H)^{-1} (sum_i sqrt(y_i) phase(a_i^H x) a_i - A A^H x),
/// evaluated in O(NK).
ComplexVector step_modulus_both_terms(const ProblemInstance& P,
                                      const ComplexVector& x,
                                      double epsilon_guard = 1e-12);

/// W = x x^H + (1/D) (B - sum_i |a_i^H x|^2 a_i a_i^H).
ComplexMatrix build_W(const ProblemInstance& P, const ComplexVector& x,
                      double D);

/// Power-family update: sqrt(max(0, rho)) u after power_steps power
/// iterations on W, warm-started at x/||x|| (all-ones if x = 0).
ComplexVector step_power(const ProblemInstance& P, const ComplexVector& x,
                         const SolverConfig& cfg);

struct Lemma2Bound {
  double value = 0.0;  // raw clamped at zero
  double raw = 0.0;
};

/// Right-hand side of the eigenvalue sign condition
///   sum_{i in I} (|a_i^H x|^2 - y_i) ||a_i||^2 / ||x||^2
///   + sum_i (|a_i^H x|^2 - y_i) |a_i^H x|^2 / ||x||^4,
/// with I = { i : y_i < |a_i^H x|^2 }. Any D above this value guarantees
/// lambda_max(W) > |lambda_min(W)|.
Lemma2Bound lemma2_bound(const ProblemInstance& P, const ComplexVector& x);

struct PowerBacktrackStep {
  ComplexVector x;
  int inner_count = 0;
  double accepted_E = 0.0;
  bool diverged = false;  // 60 inner passes exhausted
};

/// Eigenvector-free power update: doubles E until the combined surrogate
/// dominates the objective at the candidate sqrt(t) d/||d||.
PowerBacktrackStep step_power_backtracking(const ProblemInstance& P,
                                           const ComplexVector& x,
                                           const SolverConfig& cfg);

/// Combined two-stage surrogate of the squared-modulus objective at the
/// anchor; candidates with g >= f certify descent.
double eval_majorizer_power(const ProblemInstance& P,
                            const ComplexVector& candidate,
                            const ComplexVector& anchor, double D, double E);

/// Cauchy-Schwarz surrogate of the modulus objective (constant sum(y)
/// restored so it compares directly with objective_modulus).
double eval_majorizer_modulus(const ProblemInstance& P,
                              const ComplexVector& candidate,
                              const ComplexVector& anchor,
                              double epsilon_guard = 1e-12);

/// D for the power-family steps under the configured strategy.
double resolve_step_D(const ProblemInstance& P, const ComplexVector& x,
                      const SolverConfig& cfg);

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

}  // namespace phasemm
