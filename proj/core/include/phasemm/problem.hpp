#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>

#include "phasemm/types.hpp"

namespace phasemm {

enum class EnsembleKind { Gaussian, PartialDFT };

namespace detail {
// Spectral constants and the Gram factorization are computed once per
// ensemble and shared by copies; std::once_flag makes the lazy fill safe
// to race from parallel trials.
struct EnsembleCache {
  std::once_flag gram_once;
  std::once_flag lambda_gram_once;
  std::once_flag lambda_phi_once;
  ComplexMatrix gram;                           // AA^H, K x K
  std::unique_ptr<Eigen::LDLT<ComplexMatrix>> gram_ldlt;
  std::optional<double> lambda_gram;
  std::optional<double> lambda_phi;
};

struct InstanceCache {
  std::once_flag b_once;
  ComplexMatrix B;  // sum_i y_i a_i a_i^H
};
}  // namespace detail

/// The K x N measurement matrix A; columns are the measurement vectors a_i.
struct MeasurementEnsemble {
  ComplexMatrix matrix;
  EnsembleKind kind = EnsembleKind::Gaussian;
  std::optional<std::uint64_t> seed;
  std::shared_ptr<detail::EnsembleCache> cache =
      std::make_shared<detail::EnsembleCache>();

  int K() const { return static_cast<int>(matrix.rows()); }
  int N() const { return static_cast<int>(matrix.cols()); }
};

/// Nonnegative intensity measurements y with noise bookkeeping.
struct Measurements {
  RealVector values;
  double noise_variance = 0.0;
  int clamped_count = 0;  // entries clamped to 0 after noise addition
  std::optional<std::uint64_t> seed;

  int N() const { return static_cast<int>(values.size()); }
};

/// Binds the ensemble and its measurements for solver consumption.
struct ProblemInstance {
  MeasurementEnsemble ensemble;
  Measurements measurements;
  std::optional<ComplexVector> ground_truth;
  std::shared_ptr<detail::InstanceCache> cache =
      std::make_shared<detail::InstanceCache>();

  int K() const { return ensemble.K(); }
  int N() const { return ensemble.N(); }

  /// sum_i y_i a_i a_i^H, built lazily and reused by the solvers.
  const ComplexMatrix& B() const;
};

/// Initialization scale lambda with lambda^2 = K sum(y) / sum ||a_i||^2.
struct InitScale {
  double lambda = 0.0;
};

MeasurementEnsemble gen_gaussian_ensemble(int K, int N, std::uint64_t seed);

/// First K rows of the N x N DFT matrix: matrix(k, i) = exp(j 2 pi k i / N)
/// for zero-based k, i. Requires K <= N.
MeasurementEnsemble gen_dft_ensemble(int K, int N);

/// y_i = max(0, |a_i^H x|^2 + n_i) with real Gaussian noise of the given
/// variance. noise_variance = 0 reproduces the intensities exactly.
Measurements synthesize(const MeasurementEnsemble& A, const ComplexVector& x,
                        double noise_variance, std::uint64_t seed);

ProblemInstance make_instance(MeasurementEnsemble ensemble,
                              Measurements measurements,
                              std::optional<ComplexVector> ground_truth = {});

InitScale init_scale(const ProblemInstance& P);

/// sum_i (y_i - |a_i^H x|^2)^2
double objective_squared(const ProblemInstance& P, const ComplexVector& x);

/// sum_i (sqrt(y_i) - |a_i^H x|)^2
double objective_modulus(const ProblemInstance& P, const ComplexVector& x);

/// 4 sum_i (|a_i^H x|^2 - y_i) a_i (a_i^H x)
ComplexVector gradient_squared(const ProblemInstance& P,
                               const ComplexVector& x);

/// Leading eigenvector of B = sum_i y_i a_i a_i^H, scaled by the init
/// lambda when apply_scale is set, unit norm otherwise.
ComplexVector spectral_init(const ProblemInstance& P, bool apply_scale);

}  // namespace phasemm
