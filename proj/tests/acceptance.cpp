// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phasemm/experiment.hpp"
#include "phasemm/linalg.hpp"
#include "phasemm/metrics.hpp"
#include "phasemm/rng.hpp"
#include "phasemm/solvers.hpp"
#include "test_util.hpp"

using namespace phasemm;

namespace {

constexpr double kDescentSlack = 1e-10;

bool non_increasing(const std::vector<double>& trace, std::string& why) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double prev = trace[i - 1];
    if (trace[i] > prev + kDescentSlack * (1.0 + std::abs(prev))) {
      std::ostringstream ss;
      ss << "increase at iter " << i << ": " << prev << " -> " << trace[i];
      why = ss.str();
      return false;
    }
  }
  return true;
}

ProblemInstance instance_for(MatrixModel model, int K, int N,
                             std::uint64_t seed, double noise) {
  return model == MatrixModel::Gaussian
             ? testutil::gaussian_instance(K, N, seed, noise)
             : testutil::dft_instance(K, N, seed, noise);
}

// ---- criterion 1: descent ------------------------------------------------

bool criterion_descent(std::string& detail) {
  struct Variant {
    Algorithm alg;
    int power_steps;
    const char* name;
  };
  const std::vector<Variant> variants = {
      {Algorithm::GerchbergSaxton, 1, "gs"},
      {Algorithm::ModulusSingleTerm, 1, "modulus-single"},
      {Algorithm::ModulusBothTerms, 1, "modulus-both"},
      {Algorithm::Power, 50, "power(steps=50)"},
      {Algorithm::Power, 1, "power(steps=1)"},
      {Algorithm::PowerBacktracking, 1, "power-bt"},
  };
  long checked = 0;
  for (const Variant& v : variants) {
    for (MatrixModel model : {MatrixModel::Gaussian, MatrixModel::PartialDFT}) {
      for (int N : {20, 50}) {
        for (double noise : {0.0, 1e-4}) {
          for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            ProblemInstance P = instance_for(model, 10, N, seed, noise);
            SolverConfig cfg;
            cfg.algorithm = v.alg;
            cfg.power_steps = v.power_steps;
            cfg.max_iters = 200;
            cfg.rel_tol = 0.0;
            SolverRun run = solve(P, cfg);
            std::string why;
            if (!non_increasing(run.objective_trace, why)) {
              std::ostringstream ss;
              ss << v.name << " " << matrix_model_name(model) << " N=" << N
                 << " noise=" << noise << " seed=" << seed << ": " << why;
              detail = ss.str();
              return false;
            }
            ++checked;
          }
        }
      }
    }
  }
  detail = std::to_string(checked) + " traces non-increasing";
  return true;
}

// ---- criterion 2: single-term / Gerchberg-Saxton equivalence --------------

bool criterion_equivalence(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double noise = seed % 2 == 0 ? 1e-4 : 0.0;
    ProblemInstance P = testutil::gaussian_instance(10, 50, seed, noise);
    ComplexVector xg = spectral_init(P, false);
    ComplexVector xm = xg;
    for (int k = 0; k < 100; ++k) {
      xg = step_gerchberg_saxton(P, xg);
      xm = step_modulus_single_term(P, xm);
      worst = std::max(worst, (xg - xm).cwiseAbs().maxCoeff());
      if (worst > 1e-12) {
        detail = "divergence " + std::to_string(worst) + " at seed " +
                 std::to_string(seed);
        return false;
      }
    }
  }
  std::ostringstream ss;
  ss << "max per-entry difference " << worst;
  detail = ss.str();
  return true;
}

// ---- criterion 3: spectral identities -------------------------------------

bool criterion_spectral(std::string& detail) {
  for (int K = 1; K <= 8; ++K) {
    for (int N = K; N <= 16; ++N) {
      MeasurementEnsemble A = gen_dft_ensemble(K, N);
      if (lambda_max_gram(A) != static_cast<double>(N)) {
        detail = "lambda_max_gram(dft) mismatch";
        return false;
      }
      if (lambda_max_phi(A) != static_cast<double>(N) * K) {
        detail = "lambda_max_phi(dft) mismatch";
        return false;
      }
    }
  }
  for (int K = 2; K <= 4; ++K) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      MeasurementEnsemble A = gen_gaussian_ensemble(K, 3 * K, seed);
      const double lam_gram = lambda_max_gram(A);
      const auto dense_gram = oracles::dense_eig(A.matrix * A.matrix.adjoint());
      if (std::abs(lam_gram - dense_gram.lambda_max) >
          1e-8 * dense_gram.lambda_max) {
        detail = "gaussian lambda_max_gram off oracle";
        return false;
      }
      const double lam_phi = lambda_max_phi(A);
      const auto dense_phi = oracles::dense_eig(oracles::explicit_phi(A));
      if (std::abs(lam_phi - dense_phi.lambda_max) >
          1e-8 * dense_phi.lambda_max) {
        detail = "gaussian lambda_max_phi off oracle";
        return false;
      }
    }
  }
  detail = "DFT identities exact; Gaussian within 1e-8 of dense oracles";
  return true;
}

// ---- criterion 4: gradient vs finite differences ---------------------------

bool criterion_gradient(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ProblemInstance P =
        testutil::gaussian_instance(5, 20, seed, seed % 2 ? 0.0 : 1e-4);
    const ComplexVector x = random_unit_signal(5, seed + 900);
    const ComplexVector g = gradient_squared(P, x);
    const auto f = [&](const ComplexVector& v) {
      return objective_squared(P, v);
    };
    const Eigen::VectorXd fd = oracles::finite_difference_gradient(f, x, 1e-5);
    Eigen::VectorXd an(10);
    for (int j = 0; j < 5; ++j) {
      an[2 * j] = g[j].real();
      an[2 * j + 1] = g[j].imag();
    }
    worst = std::max(worst, (fd - an).norm() / fd.norm());
  }
  std::ostringstream ss;
  ss << "max relative error " << worst;
  detail = ss.str();
  return worst < 1e-6;
}

// ---- criterion 5: majorizer tangency and domination ------------------------

bool criterion_majorizers(std::string& detail) {
  SplitMix64 g(20250801);

  // Tangency, 1000 anchors per majorizer.
  for (int k = 0; k < 1000; ++k) {
    ProblemInstance P =
        testutil::gaussian_instance(6, 18, g.next() % 64, k % 2 ? 1e-4 : 0.0);
    const ComplexVector x =
        (0.3 + 1.5 * g.next_unit()) * random_unit_signal(6, g.next());
    const double D = lambda_max_phi(P.ensemble);
    const double E = 0.5 + 4.0 * g.next_unit();
    const double f2 = objective_squared(P, x);
    if (std::abs(eval_majorizer_power(P, x, x, D, E) - f2) >
        1e-9 * (1.0 + std::abs(f2))) {
      detail = "power majorizer tangency violated";
      return false;
    }
    const double f5 = objective_modulus(P, x);
    if (std::abs(eval_majorizer_modulus(P, x, x) - f5) >
        1e-9 * (1.0 + std::abs(f5))) {
      detail = "modulus majorizer tangency violated";
      return false;
    }
  }

  // Modulus domination over 1000 random pairs.
  for (int k = 0; k < 1000; ++k) {
    ProblemInstance P = testutil::gaussian_instance(6, 18, g.next() % 64);
    const ComplexVector anchor = random_unit_signal(6, g.next());
    const ComplexVector cand =
        (0.2 + 2.0 * g.next_unit()) * random_unit_signal(6, g.next());
    if (eval_majorizer_modulus(P, cand, anchor) <
        objective_modulus(P, cand) - 1e-9) {
      detail = "modulus majorizer domination violated";
      return false;
    }
  }

  // Power domination: 500 pairs harvested from backtracking runs (anchor,
  // accepted candidate, accepted E) plus 500 pairs with a densely certified
  // E >= lambda_max(-W) and random candidates.
  int harvested = 0;
  std::uint64_t seed = 1;
  while (harvested < 500) {
    ProblemInstance P = testutil::gaussian_instance(8, 32, seed, 1e-4);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::PowerBacktracking;
    const double D = lambda_max_phi(P.ensemble);
    ComplexVector x = spectral_init(P, false);
    for (int k = 0; k < 25 && harvested < 500; ++k) {
      PowerBacktrackStep s = step_power_backtracking(P, x, cfg);
      if (s.diverged) break;
      const double gm = eval_majorizer_power(P, s.x, x, D, s.accepted_E);
      if (gm < objective_squared(P, s.x) - 1e-9) {
        detail = "power majorizer below objective on accepted step";
        return false;
      }
      ++harvested;
      x = s.x;
      if (x.norm() == 0.0) break;
    }
    ++seed;
  }
  for (int k = 0; k < 500; ++k) {
    ProblemInstance P =
        testutil::gaussian_instance(5, 15, g.next() % 64, 1e-3);
    const double D = lambda_max_phi(P.ensemble);
    const ComplexVector anchor = random_unit_signal(5, g.next());
    const auto eig = oracles::dense_eig(build_W(P, anchor, D));
    const double E = std::max(0.0, -eig.lambda_min) + 0.01;
    const ComplexVector cand =
        (0.2 + 2.0 * g.next_unit()) * random_unit_signal(5, g.next());
    if (eval_majorizer_power(P, cand, anchor, D, E) <
        objective_squared(P, cand) - 1e-9) {
      detail = "power majorizer domination violated (certified E)";
      return false;
    }
  }
  detail = "tangency and domination hold on 1000 sampled pairs each";
  return true;
}

// ---- criterion 6: lemma-2 sign condition -----------------------------------

bool criterion_lemma2(std::string& detail) {
  SplitMix64 g(616);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + static_cast<int>(g.next() % 5);
    const int N = K + 2 + static_cast<int>(g.next() % 14);
    ProblemInstance P = testutil::gaussian_instance(
        K, N, g.next(), trial % 2 ? 1e-3 : 0.0);
    const ComplexVector x =
        (0.3 + 1.4 * g.next_unit()) * random_unit_signal(K, g.next());
    const double D = 1.01 * std::max(lemma2_bound(P, x).value, 1e-6);
    const auto eig = oracles::dense_eig(build_W(P, x, D));
    if (!(eig.lambda_max > std::abs(eig.lambda_min))) {
      std::ostringstream ss;
      ss << "trial " << trial << ": lambda_max " << eig.lambda_max
         << " vs |lambda_min| " << std::abs(eig.lambda_min);
      detail = ss.str();
      return false;
    }
  }
  detail = "lambda_max(W) > |lambda_min(W)| on 100 instances";
  return true;
}

// ---- criteria 7-9: Monte Carlo recovery ------------------------------------

double success_rate(const ExperimentResult& result, const std::string& algo,
                    int N, bool autocorr) {
  long hits = 0, total = 0;
  for (const TrialRecord& r : result.rows) {
    if (r.algorithm == algo && r.N == N) {
      ++total;
      const bool ok = autocorr ? r.autocorr_success.value_or(false) : r.success;
      hits += ok ? 1 : 0;
    }
  }
  return total ? static_cast<double>(hits) / total : 0.0;
}

SolverConfig make_cfg(Algorithm alg, bool accelerate) {
  SolverConfig cfg;
  cfg.algorithm = alg;
  cfg.accelerate = accelerate;
  return cfg;
}

bool criterion_gaussian_recovery(std::string& detail) {
  ExperimentSpec spec;
  spec.matrix_model = MatrixModel::Gaussian;
  spec.K = 10;
  spec.N_values = {20, 50};
  spec.trials = 100;
  spec.master_seed = 7101;
  spec.output_dir =
      std::filesystem::temp_directory_path() / "phasemm_acceptance_c7";
  spec.algorithms = {make_cfg(Algorithm::Power, true),
                     make_cfg(Algorithm::PowerBacktracking, true)};
  ExperimentResult result = run_experiment(spec);
  std::filesystem::remove_all(spec.output_dir);

  std::ostringstream ss;
  bool ok = true;
  for (const char* algo : {"power-acc", "power-bt-acc"}) {
    const double at50 = success_rate(result, algo, 50, false);
    const double at20 = success_rate(result, algo, 20, false);
    ss << algo << ": p(50)=" << at50 << " p(20)=" << at20 << "  ";
    if (at50 < 0.90 || at50 - at20 < 0.2) ok = false;
  }
  detail = ss.str();
  return ok;
}

bool criterion_dft_recovery(std::string& detail) {
  ExperimentSpec spec;
  spec.matrix_model = MatrixModel::PartialDFT;
  spec.K = 10;
  spec.N_values = {50};
  spec.trials = 100;
  spec.master_seed = 8202;
  spec.output_dir =
      std::filesystem::temp_directory_path() / "phasemm_acceptance_c8";
  spec.algorithms = {make_cfg(Algorithm::GerchbergSaxton, false),
                     make_cfg(Algorithm::ModulusSingleTerm, true),
                     make_cfg(Algorithm::ModulusBothTerms, true),
                     make_cfg(Algorithm::Power, true),
                     make_cfg(Algorithm::PowerBacktracking, true)};
  ExperimentResult result = run_experiment(spec);
  std::filesystem::remove_all(spec.output_dir);

  const double gs = success_rate(result, "gs", 50, true);
  std::ostringstream ss;
  ss << "gs=" << gs;
  bool ok = true;
  for (const char* algo : {"modulus-single-acc", "modulus-both-acc",
                           "power-acc", "power-bt-acc"}) {
    const double rate = success_rate(result, algo, 50, true);
    ss << " " << algo << "=" << rate;
    if (rate < gs - 0.1) ok = false;
  }
  detail = ss.str();
  return ok;
}

bool criterion_noise_separation(std::string& detail) {
  ExperimentSpec spec;
  spec.matrix_model = MatrixModel::Gaussian;
  spec.K = 10;
  spec.N_values = {50};
  spec.trials = 100;
  spec.noise_variance = 1e-4;
  spec.master_seed = 9303;
  spec.output_dir =
      std::filesystem::temp_directory_path() / "phasemm_acceptance_c9";
  spec.algorithms = {make_cfg(Algorithm::Power, true),
                     make_cfg(Algorithm::PowerBacktracking, true),
                     make_cfg(Algorithm::GerchbergSaxton, false),
                     make_cfg(Algorithm::ModulusSingleTerm, true),
                     make_cfg(Algorithm::ModulusBothTerms, true)};
  ExperimentResult result = run_experiment(spec);
  std::filesystem::remove_all(spec.output_dir);

  const std::vector<std::string> power_family = {"power-acc", "power-bt-acc"};
  const std::vector<std::string> modulus_family = {"gs", "modulus-single-acc",
                                                   "modulus-both-acc"};
  std::ostringstream ss;
  bool ok = true;
  for (const std::string& p : power_family) {
    const double pp = success_rate(result, p, 50, false);
    ss << p << "=" << pp << "  ";
    for (const std::string& m : modulus_family) {
      if (pp <= success_rate(result, m, 50, false)) ok = false;
    }
  }
  for (const std::string& m : modulus_family)
    ss << m << "=" << success_rate(result, m, 50, false) << "  ";
  detail = ss.str();
  return ok;
}

// ---- criterion 10: acceleration halves the iteration count -----------------

bool criterion_acceleration(std::string& detail) {
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ProblemInstance P = testutil::gaussian_instance(10, 50, seed);
    SolverConfig plain;
    plain.algorithm = Algorithm::Power;
    plain.max_iters = 200;
    plain.rel_tol = 0.0;
    SolverConfig acc = plain;
    acc.accelerate = true;
    SolverRun run_plain = solve(P, plain);
    SolverRun run_acc = solve(P, acc);
    const double target = run_plain.objective_trace.back();
    int reached = plain.max_iters;
    for (std::size_t i = 0; i < run_acc.objective_trace.size(); ++i) {
      if (run_acc.objective_trace[i] <= target) {
        reached = static_cast<int>(i);
        break;
      }
    }
    ratios.push_back(static_cast<double>(reached));
  }
  std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                   ratios.end());
  const double median = ratios[ratios.size() / 2];
  std::ostringstream ss;
  ss << "median accelerated iterations to reach plain@200: " << median;
  detail = ss.str();
  return median <= 100.0;
}

// ---- criterion 11: byte-level determinism ----------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string drop_column(const std::string& csv, int column) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string field;
    int idx = 0;
    bool first = true;
    while (std::getline(fields, field, ',')) {
      if (idx != column) {
        if (!first) out << ',';
        out << field;
        first = false;
      }
      ++idx;
    }
    out << '\n';
  }
  return out.str();
}

bool criterion_determinism(std::string& detail) {
  ExperimentSpec spec;
  spec.matrix_model = MatrixModel::PartialDFT;
  spec.K = 6;
  spec.N_values = {12, 18};
  spec.trials = 5;
  spec.noise_variance = 1e-4;
  spec.master_seed = 1111;
  spec.algorithms = {make_cfg(Algorithm::Power, true),
                     make_cfg(Algorithm::GerchbergSaxton, false),
                     make_cfg(Algorithm::PowerBacktracking, false)};
  const auto base = std::filesystem::temp_directory_path();
  spec.output_dir = base / "phasemm_acceptance_c11a";
  run_experiment(spec);
  const std::string trials1 = slurp(spec.output_dir / "trials.csv");
  const std::string summary1 = slurp(spec.output_dir / "summary.csv");
  std::filesystem::remove_all(spec.output_dir);
  spec.output_dir = base / "phasemm_acceptance_c11b";
  run_experiment(spec);
  const std::string trials2 = slurp(spec.output_dir / "trials.csv");
  const std::string summary2 = slurp(spec.output_dir / "summary.csv");
  std::filesystem::remove_all(spec.output_dir);

  if (drop_column(trials1, 9) != drop_column(trials2, 9)) {
    detail = "trials.csv differs beyond the wall_time column";
    return false;
  }
  if (drop_column(summary1, 4) != drop_column(summary2, 4)) {
    detail = "summary.csv differs beyond the mean_wall_time column";
    return false;
  }
  detail = "reruns byte-identical outside wall-time columns";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "descent suite", criterion_descent},
      {2, "single-term equals Gerchberg-Saxton", criterion_equivalence},
      {3, "spectral identities", criterion_spectral},
      {4, "gradient finite-difference check", criterion_gradient},
      {5, "majorizer tangency and domination", criterion_majorizers},
      {6, "lemma-2 sign condition", criterion_lemma2},
      {7, "Gaussian recovery at desk scale", criterion_gaussian_recovery},
      {8, "DFT autocorrelation recovery", criterion_dft_recovery},
      {9, "noise separation of the power family", criterion_noise_separation},
      {10, "acceleration halves iterations", criterion_acceleration},
      {11, "bench determinism", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", ok ? "PASS" : "FAIL",
                c.id, c.label, secs, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
