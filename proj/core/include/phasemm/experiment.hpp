#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phasemm/metrics.hpp"
#include "phasemm/problem.hpp"
#include "phasemm/solvers.hpp"

namespace phasemm {

enum class MatrixModel { Gaussian, PartialDFT };

/// One Monte Carlo sweep: algorithms x N values x trials.
///
/// Gaussian model: the ground truth is drawn once from the master seed and
/// a fresh measurement matrix is drawn per trial. PartialDFT model: the
/// matrix is fixed and a fresh unit-norm ground truth is drawn per trial.
struct ExperimentSpec {
  MatrixModel matrix_model = MatrixModel::Gaussian;
  int K = 10;
  std::vector<int> N_values = {50};
  int trials = 100;
  double noise_variance = 0.0;
  std::vector<SolverConfig> algorithms;
  std::uint64_t master_seed = 1;
  // Success threshold on the setting-appropriate squared error; defaults to
  // 1e-4 (aligned error, Gaussian) or 1e-8 (autocorrelation error, DFT).
  std::optional<double> success_threshold;
  std::filesystem::path output_dir = "phasemm-out";

  double resolved_threshold() const {
    if (success_threshold) return *success_threshold;
    return matrix_model == MatrixModel::Gaussian ? 1e-4 : 1e-8;
  }
};

/// One CSV row.
struct TrialRecord {
  int trial_index = 0;
  std::string algorithm;
  int N = 0;
  std::uint64_t seed = 0;
  double aligned_sq_error = 0.0;
  std::optional<double> autocorr_sq_error;
  bool success = false;
  std::optional<bool> autocorr_success;
  int iterations = 0;
  double wall_time_s = 0.0;
  double final_objective = 0.0;
  std::string status;  // converged | max-iters | failed: <reason>
};

struct AggregateRow {
  std::string algorithm;
  int N = 0;
  double mean_squared_error = 0.0;  // setting-appropriate error
  double success_probability = 0.0;
  double mean_wall_time = 0.0;
  double mean_iterations = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> rows;
  std::vector<AggregateRow> aggregate;
};

struct TraceTable {
  std::vector<std::string> columns;        // iteration, <algo>_obj_squared, ...
  std::vector<std::vector<double>> rows;   // max_iters + 1 rows
};

/// Stable identifier used in CSV columns and CLI flags ("power",
/// "power-acc", "modulus-both", ...).
std::string algorithm_id(const SolverConfig& cfg);

/// Default-configured solver for an id string; a trailing "-acc" turns on
/// acceleration. Throws SpecError for unknown ids.
SolverConfig algorithm_config_from_id(const std::string& id);

/// Deterministic per-cell seed; independent of execution order.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index, int N,
                         int algo_index);

TrialRecord run_trial(const ExperimentSpec& spec, int trial_index, int N,
                      const SolverConfig& cfg, int algo_index);

/// Runs every (N, algorithm, trial) cell (trials run on a small worker
/// pool), writes <output_dir>/trials.csv and <output_dir>/summary.csv, and
/// returns the rows. Output files are created before any solve so an
/// unwritable directory fails fast.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Objective-versus-iteration table for every configured algorithm on one
/// shared instance at the given N; both objective formulations are recorded
/// for every algorithm. Writes <output_dir>/trace_N<value>.csv. Rows are
/// padded to max_iters + 1 (iteration 0 included) when a run stops early.
TraceTable trace_experiment(const ExperimentSpec& spec, int N);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows);
void write_summary_csv(std::ostream& out,
                       const std::vector<AggregateRow>& rows);

/// Raised for malformed spec files (bad values, unknown keys).
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when output files cannot be created or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads a JSON spec file mirroring ExperimentSpec field for field.
/// Unknown keys are an error. Algorithm entries are either id strings or
/// objects ({"algorithm": "power", "accelerate": true, ...}).
ExperimentSpec load_spec_file(const std::filesystem::path& path);

std::string matrix_model_name(MatrixModel m);
std::optional<MatrixModel> matrix_model_from_name(const std::string& name);

}  // namespace phasemm
