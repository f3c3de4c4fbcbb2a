#include "phasemm/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "phasemm/linalg.hpp"
#include "phasemm/metrics.hpp"
#include "phasemm/problem.hpp"
#include "phasemm/rng.hpp"
#include "phasemm/solvers.hpp"

namespace phasemm {

namespace {

ProblemInstance random_instance(int K, int N, std::uint64_t seed,
                                double noise = 0.0) {
  MeasurementEnsemble A = gen_gaussian_ensemble(K, N, seed);
  ComplexVector x_o = random_unit_signal(K, mix_seed(seed, 0x1));
  Measurements y = synthesize(A, x_o, noise, mix_seed(seed, 0x2));
  return make_instance(std::move(A), std::move(y), std::move(x_o));
}

bool check_dft_identities() {
  for (int K = 1; K <= 8; ++K) {
    for (int N = K; N <= 16; ++N) {
      MeasurementEnsemble A = gen_dft_ensemble(K, N);
      if (lambda_max_gram(A) != static_cast<double>(N)) return false;
      if (lambda_max_phi(A) != static_cast<double>(N) * K) return false;
    }
  }
  return true;
}

bool check_determinism() {
  MeasurementEnsemble a = gen_gaussian_ensemble(10, 50, 7);
  MeasurementEnsemble b = gen_gaussian_ensemble(10, 50, 7);
  if (a.matrix != b.matrix) return false;
  const ComplexVector x = random_unit_signal(10, 3);
  Measurements m1 = synthesize(a, x, 1e-4, 11);
  Measurements m2 = synthesize(b, x, 1e-4, 11);
  return m1.values == m2.values && m1.clamped_count == m2.clamped_count;
}

bool check_gs_equivalence() {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ProblemInstance P = random_instance(8, 24, seed);
    ComplexVector xg = spectral_init(P, false);
    ComplexVector xm = xg;
    for (int k = 0; k < 30; ++k) {
      xg = step_gerchberg_saxton(P, xg);
      xm = step_modulus_single_term(P, xm);
      if ((xg - xm).cwiseAbs().maxCoeff() > 1e-12) return false;
    }
  }
  return true;
}

bool check_descent() {
  for (Algorithm alg : {Algorithm::GerchbergSaxton, Algorithm::ModulusBothTerms,
                        Algorithm::Power, Algorithm::PowerBacktracking}) {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
      ProblemInstance P = random_instance(10, 30, seed);
      SolverConfig cfg;
      cfg.algorithm = alg;
      cfg.max_iters = 100;
      cfg.rel_tol = 0.0;
      SolverRun run = solve(P, cfg);
      for (std::size_t i = 1; i < run.objective_trace.size(); ++i) {
        const double prev = run.objective_trace[i - 1];
        if (run.objective_trace[i] > prev + 1e-10 * (1.0 + std::abs(prev)))
          return false;
      }
    }
  }
  return true;
}

bool check_majorizer_tangency() {
  ProblemInstance P = random_instance(6, 18, 21);
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    const ComplexVector x = random_unit_signal(6, seed);
    const double f2 = objective_squared(P, x);
    const double D = lambda_max_phi(P.ensemble);
    const double g2 = eval_majorizer_power(P, x, x, D, 1.0);
    if (std::abs(g2 - f2) > 1e-9 * (1.0 + std::abs(f2))) return false;
    const double f5 = objective_modulus(P, x);
    const double g5 = eval_majorizer_modulus(P, x, x);
    if (std::abs(g5 - f5) > 1e-9 * (1.0 + std::abs(f5))) return false;
  }
  return true;
}

bool check_modulus_domination() {
  ProblemInstance P = random_instance(6, 18, 22);
  SplitMix64 g(99);
  for (int k = 0; k < 200; ++k) {
    const ComplexVector anchor = random_unit_signal(6, g.next());
    const ComplexVector cand = random_unit_signal(6, g.next());
    const double surrogate = eval_majorizer_modulus(P, cand, anchor);
    if (surrogate < objective_modulus(P, cand) - 1e-9) return false;
  }
  return true;
}

bool check_gradient() {
  ProblemInstance P = random_instance(5, 20, 41);
  const ComplexVector x = random_unit_signal(5, 42);
  const ComplexVector g = gradient_squared(P, x);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (int j = 0; j < 5; ++j) {
    for (int part = 0; part < 2; ++part) {
      ComplexVector xp = x, xm = x;
      const Complex delta = part == 0 ? Complex(h, 0) : Complex(0, h);
      xp[j] += delta;
      xm[j] -= delta;
      const double fd =
          (objective_squared(P, xp) - objective_squared(P, xm)) / (2.0 * h);
      const double an = part == 0 ? g[j].real() : g[j].imag();
      max_rel = std::max(max_rel,
                         std::abs(fd - an) / std::max(1e-12, std::abs(fd)));
    }
  }
  return max_rel < 1e-6;
}

bool check_align_phase() {
  SplitMix64 g(123);
  for (int k = 0; k < 20; ++k) {
    const ComplexVector a = random_unit_signal(8, g.next());
    const ComplexVector b = random_unit_signal(8, g.next());
    const double best = aligned_squared_error(a, b);
    for (int i = 0; i < 720; ++i) {
      const double phi = 2.0 * M_PI * i / 720.0;
      const double h = (a - b * std::polar(1.0, phi)).squaredNorm();
      if (h < best - 1e-9) return false;
    }
  }
  return true;
}

}  // namespace

int selftest(std::ostream& out) {
  struct Suite {
    const char* name;
    std::function<bool()> run;
  };
  const std::vector<Suite> suites = {
      {"dft-spectral-identities", check_dft_identities},
      {"seeded-determinism", check_determinism},
      {"gs-single-term-equivalence", check_gs_equivalence},
      {"mm-descent", check_descent},
      {"majorizer-tangency", check_majorizer_tangency},
      {"modulus-majorizer-domination", check_modulus_domination},
      {"gradient-finite-differences", check_gradient},
      {"align-phase-grid", check_align_phase},
  };

  int failures = 0;
  for (const Suite& s : suites) {
    bool ok = false;
    std::string error;
    try {
      ok = s.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    if (ok) {
      out << "[ ok ] " << s.name << "\n";
    } else {
      ++failures;
      out << "[FAIL] " << s.name;
      if (!error.empty()) out << " (" << error << ")";
      out << "\n";
    }
  }
  return failures;
}

}  // namespace phasemm
