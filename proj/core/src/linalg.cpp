#include "phasemm/linalg.hpp"

#include <cmath>
#include <mutex>

namespace phasemm {

namespace {

ComplexVector ones_start(Eigen::Index n) {
  ComplexVector v = ComplexVector::Constant(n, Complex(1.0, 0.0));
  return v / v.norm();
}

double rayleigh(const ComplexMatrix& M, const ComplexVector& u) {
  return std::real(u.dot(M * u));
}

}  // namespace

EigPair power_iteration(const ComplexMatrix& M, int steps,
                        const ComplexVector& start) {
  if (steps < 1) throw InvalidArgument("power_iteration: steps must be >= 1");
  if (M.rows() != M.cols() || M.rows() != start.size())
    throw InvalidArgument("power_iteration: dimension mismatch");
  double n = start.norm();
  if (n == 0.0) throw InvalidArgument("power_iteration: zero start vector");

  ComplexVector u = start / n;
  for (int k = 0; k < steps; ++k) {
    ComplexVector w = M * u;
    const double wn = w.norm();
    if (wn == 0.0 || !std::isfinite(wn)) throw DegenerateMatrix(k);
    u = w / wn;
  }
  return {rayleigh(M, u), std::move(u)};
}

LeadingEig leading_eigpair(const ComplexMatrix& M, double tol, int max_steps,
                           const ComplexVector& start) {
  if (tol <= 0.0) throw InvalidArgument("leading_eigpair: tol must be > 0");
  if (max_steps < 1)
    throw InvalidArgument("leading_eigpair: max_steps must be >= 1");
  double n = start.norm();
  if (n == 0.0) throw InvalidArgument("leading_eigpair: zero start vector");

  ComplexVector u = start / n;
  double rho = rayleigh(M, u);
  for (int k = 0; k < max_steps; ++k) {
    ComplexVector w = M * u;
    const double wn = w.norm();
    if (wn == 0.0 || !std::isfinite(wn)) throw DegenerateMatrix(k);
    u = w / wn;
    const double rho_next = rayleigh(M, u);
    const bool settled = std::abs(rho_next - rho) < tol;
    rho = rho_next;
    if (settled) return {rho, std::move(u), true, k + 1};
  }
  return {rho, std::move(u), false, max_steps};
}

LeadingEig leading_eigpair(const ComplexMatrix& M, double tol, int max_steps) {
  return leading_eigpair(M, tol, max_steps, ones_start(M.rows()));
}

namespace {

void ensure_gram(const MeasurementEnsemble& A) {
  std::call_once(A.cache->gram_once, [&] {
    const int K = A.K();
    ComplexMatrix G = A.matrix * A.matrix.adjoint();
    auto ldlt = std::make_unique<Eigen::LDLT<ComplexMatrix>>(G);
    const double floor = 1e-12 * G.trace().real() / static_cast<double>(K);
    if (ldlt->info() != Eigen::Success ||
        ldlt->vectorD().real().minCoeff() < floor) {
      throw SingularGram("gram_solve: AA^H is numerically rank deficient");
    }
    A.cache->gram = std::move(G);
    A.cache->gram_ldlt = std::move(ldlt);
  });
}

}  // namespace

ComplexVector gram_solve(const MeasurementEnsemble& A, const ComplexVector& b) {
  if (b.size() != A.N())
    throw InvalidArgument("gram_solve: rhs length must equal N");
  if (A.kind == EnsembleKind::PartialDFT) {
    // AA^H = N I for the partial DFT rows.
    return (A.matrix * b) / static_cast<double>(A.N());
  }
  ensure_gram(A);
  return A.cache->gram_ldlt->solve(A.matrix * b);
}

double lambda_max_gram(const MeasurementEnsemble& A) {
  std::call_once(A.cache->lambda_gram_once, [&] {
    if (A.kind == EnsembleKind::PartialDFT) {
      A.cache->lambda_gram = static_cast<double>(A.N());
      return;
    }
    ensure_gram(A);
    A.cache->lambda_gram = leading_eigpair(A.cache->gram, 1e-10, 100000).value;
  });
  return *A.cache->lambda_gram;
}

ComplexMatrix phi_matvec(const MeasurementEnsemble& A, const ComplexMatrix& V) {
  const int K = A.K();
  if (V.rows() != K || V.cols() != K)
    throw InvalidArgument("phi_matvec: V must be K x K");
  // s_i = a_i^H V a_i, then sum_i s_i a_i a_i^H = A Diag(s) A^H.
  ComplexMatrix T = V * A.matrix;
  ComplexVector s = A.matrix.conjugate().cwiseProduct(T).colwise().sum();
  return (A.matrix * s.asDiagonal()) * A.matrix.adjoint();
}

double lambda_max_phi(const MeasurementEnsemble& A) {
  std::call_once(A.cache->lambda_phi_once, [&] {
    if (A.kind == EnsembleKind::PartialDFT) {
      A.cache->lambda_phi = static_cast<double>(A.N()) * A.K();
      return;
    }
    // Power iteration directly on the K x K reshaping of vec(V); Phi is
    // never materialized.
    const int K = A.K();
    ComplexMatrix V = ComplexMatrix::Constant(K, K, Complex(1.0, 0.0));
    V /= V.norm();
    ComplexMatrix PV = phi_matvec(A, V);
    double rho = std::real(V.conjugate().cwiseProduct(PV).sum());
    constexpr int kMaxSteps = 100000;
    for (int k = 0; k < kMaxSteps; ++k) {
      const double nrm = PV.norm();
      if (nrm == 0.0 || !std::isfinite(nrm)) throw DegenerateMatrix(k);
      V = PV / nrm;
      PV = phi_matvec(A, V);
      const double rho_next = std::real(V.conjugate().cwiseProduct(PV).sum());
      const bool settled = std::abs(rho_next - rho) < 1e-10;
      rho = rho_next;
      if (settled) break;
    }
    A.cache->lambda_phi = rho;
  });
  return *A.cache->lambda_phi;
}

}  // namespace phasemm
