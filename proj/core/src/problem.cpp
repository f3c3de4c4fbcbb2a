#include "phasemm/problem.hpp"

#include <cmath>
#include <mutex>

#include "phasemm/linalg.hpp"
#include "phasemm/rng.hpp"

namespace phasemm {

namespace {

// All intensity evaluations go through this one expression so that
// synthesize() and the objectives reproduce bit-identical products.
ComplexVector measurement_products(const MeasurementEnsemble& A,
                                   const ComplexVector& x) {
  if (x.size() != A.K())
    throw InvalidArgument("signal length must equal K");
  return A.matrix.adjoint() * x;
}

}  // namespace

const ComplexMatrix& ProblemInstance::B() const {
  std::call_once(cache->b_once, [&] {
    cache->B = ensemble.matrix *
               measurements.values.cast<Complex>().asDiagonal() *
               ensemble.matrix.adjoint();
  });
  return cache->B;
}

MeasurementEnsemble gen_gaussian_ensemble(int K, int N, std::uint64_t seed) {
  if (K < 1 || N < 1) throw InvalidArgument("ensemble dimensions must be >= 1");
  MeasurementEnsemble A;
  A.kind = EnsembleKind::Gaussian;
  A.seed = seed;
  A.matrix.resize(K, N);
  NormalSampler normal(seed);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < K; ++k) A.matrix(k, i) = normal.next_complex();
  return A;
}

MeasurementEnsemble gen_dft_ensemble(int K, int N) {
  if (K < 1 || N < 1) throw InvalidArgument("ensemble dimensions must be >= 1");
  if (K > N) throw InvalidArgument("partial DFT ensemble requires K <= N");
  MeasurementEnsemble A;
  A.kind = EnsembleKind::PartialDFT;
  A.matrix.resize(K, N);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < N; ++i) {
      const double angle = 2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(i) / static_cast<double>(N);
      A.matrix(k, i) = Complex(std::cos(angle), std::sin(angle));
    }
  }
  std::call_once(A.cache->lambda_gram_once,
                 [&] { A.cache->lambda_gram = static_cast<double>(N); });
  std::call_once(A.cache->lambda_phi_once, [&] {
    A.cache->lambda_phi = static_cast<double>(N) * static_cast<double>(K);
  });
  return A;
}

Measurements synthesize(const MeasurementEnsemble& A, const ComplexVector& x,
                        double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0)
    throw InvalidArgument("synthesize: noise variance must be >= 0");
  Measurements m;
  m.noise_variance = noise_variance;
  m.seed = seed;
  m.values = measurement_products(A, x).cwiseAbs2();
  if (noise_variance > 0.0) {
    NormalSampler normal(seed);
    const double sigma = std::sqrt(noise_variance);
    for (Eigen::Index i = 0; i < m.values.size(); ++i) {
      const double noisy = m.values[i] + sigma * normal.next();
      if (noisy < 0.0) {
        m.values[i] = 0.0;
        ++m.clamped_count;
      } else {
        m.values[i] = noisy;
      }
    }
  }
  return m;
}

ProblemInstance make_instance(MeasurementEnsemble ensemble,
                              Measurements measurements,
                              std::optional<ComplexVector> ground_truth) {
  if (measurements.N() != ensemble.N())
    throw InvalidArgument("measurements length must equal ensemble N");
  ProblemInstance P;
  P.ensemble = std::move(ensemble);
  P.measurements = std::move(measurements);
  P.ground_truth = std::move(ground_truth);
  return P;
}

InitScale init_scale(const ProblemInstance& P) {
  const double col_energy = P.ensemble.matrix.colwise().squaredNorm().sum();
  if (col_energy <= 0.0) throw InvalidArgument("init_scale: empty ensemble");
  const double lambda_sq =
      static_cast<double>(P.K()) * P.measurements.values.sum() / col_energy;
  return {std::sqrt(lambda_sq)};
}

double objective_squared(const ProblemInstance& P, const ComplexVector& x) {
  const RealVector intensities =
      measurement_products(P.ensemble, x).cwiseAbs2();
  return (P.measurements.values - intensities).squaredNorm();
}

double objective_modulus(const ProblemInstance& P, const ComplexVector& x) {
  const RealVector moduli = measurement_products(P.ensemble, x).cwiseAbs();
  return (P.measurements.values.cwiseSqrt() - moduli).squaredNorm();
}

ComplexVector gradient_squared(const ProblemInstance& P,
                               const ComplexVector& x) {
  const ComplexVector z = measurement_products(P.ensemble, x);
  const RealVector residual = z.cwiseAbs2() - P.measurements.values;
  return 4.0 * (P.ensemble.matrix *
                (residual.cast<Complex>().cwiseProduct(z)));
}

ComplexVector spectral_init(const ProblemInstance& P, bool apply_scale) {
  if ((P.measurements.values.array() == 0.0).all())
    throw DegenerateInit("spectral_init: all measurements are zero");
  // Fixed pseudo-random start, not all-ones: for the partial DFT model B is
  // Toeplitz, the all-ones vector lies exactly in the conjugate-symmetric
  // eigenvector class, and every update map preserves that class, so an
  // exactly symmetric start can never leave it.
  const ComplexVector start = random_unit_signal(P.K(), 0x5EED0FF5EULL);
  LeadingEig eig = leading_eigpair(P.B(), 1e-10, 2000, start);
  if (apply_scale) return init_scale(P).lambda * eig.vector;
  return eig.vector;
}

}  // namespace phasemm
