#pragma once

#include "phasemm/problem.hpp"
#include "phasemm/types.hpp"

namespace phasemm {

struct EigPair {
  double value = 0.0;     // Rayleigh quotient u^H M u
  ComplexVector vector;   // unit Euclidean norm
};

struct LeadingEig {
  double value = 0.0;
  ComplexVector vector;
  bool converged = false;
  int steps = 0;
};

/// Applies M to `start` the given number of times, renormalizing after each
/// application, and returns the final unit vector with its Rayleigh
/// quotient. Throws DegenerateMatrix (with the step index) if an
/// application yields the zero vector.
EigPair power_iteration(const ComplexMatrix& M, int steps,
                        const ComplexVector& start);

/// Power iteration until the Rayleigh quotient changes by less than tol
/// between consecutive steps, or max_steps is reached (reported via the
/// converged flag, not an error). Starts from the normalized all-ones
/// vector unless a start vector is supplied.
LeadingEig leading_eigpair(const ComplexMatrix& M, double tol, int max_steps);
LeadingEig leading_eigpair(const ComplexMatrix& M, double tol, int max_steps,
                           const ComplexVector& start);

/// x = (AA^H)^{-1} A b, the least-squares solution of A^H x ~ b. The Gram
/// matrix and its factorization are computed once per ensemble. For the
/// partial DFT ensemble AA^H = N I, so the solve reduces to (1/N) A b.
ComplexVector gram_solve(const MeasurementEnsemble& A, const ComplexVector& b);

/// Largest eigenvalue of AA^H: exactly N for the partial DFT ensemble,
/// computed by power iteration otherwise. Cached on the ensemble.
double lambda_max_gram(const MeasurementEnsemble& A);

/// Largest eigenvalue of Phi = sum_i vec(a_i a_i^H) vec(a_i a_i^H)^H:
/// exactly N*K for the partial DFT ensemble, computed matrix-free through
/// phi_matvec otherwise (Phi itself, K^2 x K^2, is never formed). Cached.
double lambda_max_phi(const MeasurementEnsemble& A);

/// Reshaped product Phi vec(V): sum_i (a_i^H V a_i) a_i a_i^H in O(N K^2).
ComplexMatrix phi_matvec(const MeasurementEnsemble& A, const ComplexMatrix& V);

}  // namespace phasemm
