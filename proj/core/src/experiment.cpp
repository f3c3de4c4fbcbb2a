#include "phasemm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "phasemm/rng.hpp"

namespace phasemm {

namespace {

constexpr std::uint64_t kTagGroundTruth = 0x67;
constexpr std::uint64_t kTagEnsemble = 0xE5;
constexpr std::uint64_t kTagSignal = 0x51;
constexpr std::uint64_t kTagNoise = 0xA0;
constexpr std::uint64_t kTagTrace = 0x7C;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

std::string fmt_opt(const std::optional<bool>& v) {
  return v ? std::string(*v ? "1" : "0") : std::string();
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.K < 1) throw SpecError("K must be >= 1");
  if (spec.trials < 1) throw SpecError("trials must be >= 1");
  if (spec.noise_variance < 0.0)
    throw SpecError("noise_variance must be >= 0");
  if (spec.N_values.empty()) throw SpecError("N_values must be nonempty");
  if (spec.algorithms.empty()) throw SpecError("algorithms must be nonempty");
  for (int n : spec.N_values) {
    if (n < 1) throw SpecError("N values must be >= 1");
    if (spec.matrix_model == MatrixModel::PartialDFT && n < spec.K)
      throw SpecError("partial DFT model requires every N >= K");
  }
  if (spec.success_threshold && *spec.success_threshold <= 0.0)
    throw SpecError("success_threshold must be > 0");
}

std::string status_string(const SolverRun& run) {
  switch (run.status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max-iters";
    case SolveStatus::Failed: return "failed: " + run.failure_reason;
  }
  return "unknown";
}

}  // namespace

std::string algorithm_id(const SolverConfig& cfg) {
  if (cfg.algorithm == Algorithm::WirtingerFlow) {
    // Acceleration does not apply to the gradient baseline, so the id only
    // reflects the step rule.
    return cfg.wf_step == WfStepRule::Backtracking ? "wf-bt" : "wf";
  }
  std::string id = algorithm_name(cfg.algorithm);
  if (cfg.accelerate) id += "-acc";
  return id;
}

SolverConfig algorithm_config_from_id(const std::string& id) {
  SolverConfig cfg;
  std::string base = id;
  if (base.size() > 4 && base.substr(base.size() - 4) == "-acc") {
    cfg.accelerate = true;
    base = base.substr(0, base.size() - 4);
  }
  if (base == "wf-bt") {
    cfg.algorithm = Algorithm::WirtingerFlow;
    cfg.wf_step = WfStepRule::Backtracking;
    return cfg;
  }
  const auto alg = algorithm_from_name(base);
  if (!alg) throw SpecError("unknown algorithm: " + id);
  cfg.algorithm = *alg;
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index, int N,
                         int algo_index) {
  std::uint64_t s = mix_seed(master_seed, static_cast<std::uint64_t>(trial_index));
  s = mix_seed(s, static_cast<std::uint64_t>(N));
  return mix_seed(s, static_cast<std::uint64_t>(algo_index));
}

TrialRecord run_trial(const ExperimentSpec& spec, int trial_index, int N,
                      const SolverConfig& cfg, int algo_index) {
  const std::uint64_t cell_seed =
      trial_seed(spec.master_seed, trial_index, N, algo_index);

  MeasurementEnsemble ensemble;
  ComplexVector x_o;
  if (spec.matrix_model == MatrixModel::Gaussian) {
    // Fixed ground truth, fresh measurement matrix per trial.
    x_o = random_unit_signal(spec.K, mix_seed(spec.master_seed, kTagGroundTruth));
    ensemble =
        gen_gaussian_ensemble(spec.K, N, mix_seed(cell_seed, kTagEnsemble));
  } else {
    // Fixed measurement matrix, fresh ground truth per trial.
    ensemble = gen_dft_ensemble(spec.K, N);
    x_o = random_unit_signal(spec.K, mix_seed(cell_seed, kTagSignal));
  }
  Measurements meas = synthesize(ensemble, x_o, spec.noise_variance,
                                 mix_seed(cell_seed, kTagNoise));
  ProblemInstance P = make_instance(std::move(ensemble), std::move(meas), x_o);

  TrialRecord row;
  row.trial_index = trial_index;
  row.algorithm = algorithm_id(cfg);
  row.N = N;
  row.seed = cell_seed;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    SolverRun run = solve(P, cfg);
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const auto setting = spec.matrix_model == MatrixModel::Gaussian
                             ? RecoverySetting::GaussianDirect
                             : RecoverySetting::DFTAutocorr;
    const double aligned_threshold =
        spec.matrix_model == MatrixModel::Gaussian ? spec.resolved_threshold()
                                                   : 1e-4;
    RecoveryReport report = classify(run.final_x, x_o, setting,
                                     aligned_threshold,
                                     spec.resolved_threshold());
    row.aligned_sq_error = report.aligned_squared_error;
    row.autocorr_sq_error = report.autocorr_squared_error;
    row.success = report.success;
    row.autocorr_success = report.autocorr_success;
    row.iterations = run.iterations_used;
    row.final_objective = run.objective_trace.back();
    row.status = status_string(run);
  } catch (const std::exception& e) {
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    row.aligned_sq_error = std::nan("");
    row.final_objective = std::nan("");
    row.status = std::string("failed: ") + e.what();
  }
  return row;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows) {
  out << "trial_index,algorithm,N,seed,aligned_sq_error,autocorr_sq_error,"
         "success,autocorr_success,iterations,wall_time_s,final_objective,"
         "status\n";
  for (const TrialRecord& r : rows) {
    out << r.trial_index << ',' << r.algorithm << ',' << r.N << ',' << r.seed
        << ',' << fmt(r.aligned_sq_error) << ',' << fmt_opt(r.autocorr_sq_error)
        << ',' << (r.success ? 1 : 0) << ',' << fmt_opt(r.autocorr_success)
        << ',' << r.iterations << ',' << fmt(r.wall_time_s) << ','
        << fmt(r.final_objective) << ',' << r.status << '\n';
  }
}

void write_summary_csv(std::ostream& out,
                       const std::vector<AggregateRow>& rows) {
  out << "algorithm,N,mean_squared_error,success_probability,mean_wall_time,"
         "mean_iterations\n";
  for (const AggregateRow& r : rows) {
    out << r.algorithm << ',' << r.N << ',' << fmt(r.mean_squared_error) << ','
        << fmt(r.success_probability) << ',' << fmt(r.mean_wall_time) << ','
        << fmt(r.mean_iterations) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  std::ofstream trials_out(spec.output_dir / "trials.csv");
  std::ofstream summary_out(spec.output_dir / "summary.csv");
  if (!trials_out || !summary_out)
    throw IoError("cannot write to " + spec.output_dir.string());

  struct Cell {
    int n_index, algo_index, trial;
  };
  std::vector<Cell> cells;
  cells.reserve(spec.N_values.size() * spec.algorithms.size() * spec.trials);
  for (std::size_t ni = 0; ni < spec.N_values.size(); ++ni)
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai)
      for (int t = 0; t < spec.trials; ++t)
        cells.push_back({static_cast<int>(ni), static_cast<int>(ai), t});

  ExperimentResult result;
  result.rows.resize(cells.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr worker_error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
        const Cell& c = cells[i];
        result.rows[i] =
            run_trial(spec, c.trial, spec.N_values[c.n_index],
                      spec.algorithms[c.algo_index], c.algo_index);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!worker_error) worker_error = std::current_exception();
    }
  };

  const unsigned pool =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::thread> threads;
  for (unsigned i = 1; i < pool; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (worker_error) std::rethrow_exception(worker_error);

  // Aggregate per (N, algorithm) in row order.
  for (std::size_t ni = 0; ni < spec.N_values.size(); ++ni) {
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      AggregateRow agg;
      agg.algorithm = algorithm_id(spec.algorithms[ai]);
      agg.N = spec.N_values[ni];
      long success_count = 0;
      double err_sum = 0.0;
      long err_count = 0;
      double wall_sum = 0.0, iter_sum = 0.0;
      const std::size_t base =
          (ni * spec.algorithms.size() + ai) * spec.trials;
      for (int t = 0; t < spec.trials; ++t) {
        const TrialRecord& r = result.rows[base + t];
        const bool ok = spec.matrix_model == MatrixModel::Gaussian
                            ? r.success
                            : r.autocorr_success.value_or(false);
        success_count += ok ? 1 : 0;
        const double err = spec.matrix_model == MatrixModel::Gaussian
                               ? r.aligned_sq_error
                               : r.autocorr_sq_error.value_or(
                                     std::numeric_limits<double>::quiet_NaN());
        if (std::isfinite(err)) {
          err_sum += err;
          ++err_count;
        }
        wall_sum += r.wall_time_s;
        iter_sum += r.iterations;
      }
      agg.success_probability =
          static_cast<double>(success_count) / spec.trials;
      agg.mean_squared_error =
          err_count > 0 ? err_sum / err_count
                        : std::numeric_limits<double>::quiet_NaN();
      agg.mean_wall_time = wall_sum / spec.trials;
      agg.mean_iterations = iter_sum / spec.trials;
      result.aggregate.push_back(std::move(agg));
    }
  }

  write_trials_csv(trials_out, result.rows);
  write_summary_csv(summary_out, result.aggregate);
  if (!trials_out.flush() || !summary_out.flush())
    throw IoError("failed writing CSV output");
  return result;
}

TraceTable trace_experiment(const ExperimentSpec& spec, int N) {
  validate_spec(spec);
  if (spec.matrix_model == MatrixModel::PartialDFT && N < spec.K)
    throw SpecError("partial DFT model requires N >= K");

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  std::ofstream out(spec.output_dir /
                    ("trace_N" + std::to_string(N) + ".csv"));
  if (!out) throw IoError("cannot write to " + spec.output_dir.string());

  // One shared instance for every algorithm.
  const std::uint64_t trace_seed = mix_seed(
      mix_seed(spec.master_seed, static_cast<std::uint64_t>(N)), kTagTrace);
  MeasurementEnsemble ensemble;
  ComplexVector x_o;
  if (spec.matrix_model == MatrixModel::Gaussian) {
    x_o = random_unit_signal(spec.K, mix_seed(spec.master_seed, kTagGroundTruth));
    ensemble =
        gen_gaussian_ensemble(spec.K, N, mix_seed(trace_seed, kTagEnsemble));
  } else {
    ensemble = gen_dft_ensemble(spec.K, N);
    x_o = random_unit_signal(spec.K, mix_seed(trace_seed, kTagSignal));
  }
  Measurements meas = synthesize(ensemble, x_o, spec.noise_variance,
                                 mix_seed(trace_seed, kTagNoise));
  ProblemInstance P = make_instance(std::move(ensemble), std::move(meas), x_o);

  TraceTable table;
  table.columns.push_back("iteration");
  int rows = 0;
  for (const SolverConfig& cfg : spec.algorithms)
    rows = std::max(rows, cfg.max_iters + 1);

  std::map<std::string, int> seen;
  std::vector<std::vector<double>> per_algo_sq, per_algo_mod;
  for (const SolverConfig& cfg : spec.algorithms) {
    std::string id = algorithm_id(cfg);
    const int dup = ++seen[id];
    if (dup > 1) id += "#" + std::to_string(dup);
    table.columns.push_back(id + "_obj_squared");
    table.columns.push_back(id + "_obj_modulus");

    std::vector<double> sq, mod;
    sq.reserve(rows);
    mod.reserve(rows);
    solve(P, cfg, [&](int, const ComplexVector& x, double) {
      sq.push_back(objective_squared(P, x));
      mod.push_back(objective_modulus(P, x));
    });
    // Early convergence: hold the last value so every column has the same
    // number of rows.
    while (static_cast<int>(sq.size()) < rows) {
      sq.push_back(sq.back());
      mod.push_back(mod.back());
    }
    per_algo_sq.push_back(std::move(sq));
    per_algo_mod.push_back(std::move(mod));
  }

  table.rows.reserve(rows);
  for (int it = 0; it < rows; ++it) {
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(it);
    for (std::size_t a = 0; a < per_algo_sq.size(); ++a) {
      row.push_back(per_algo_sq[a][it]);
      row.push_back(per_algo_mod[a][it]);
    }
    table.rows.push_back(std::move(row));
  }

  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    out << static_cast<long long>(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) out << ',' << fmt(row[c]);
    out << '\n';
  }
  if (!out.flush()) throw IoError("failed writing trace CSV");
  return table;
}

std::string matrix_model_name(MatrixModel m) {
  return m == MatrixModel::Gaussian ? "gaussian" : "dft";
}

std::optional<MatrixModel> matrix_model_from_name(const std::string& name) {
  if (name == "gaussian") return MatrixModel::Gaussian;
  if (name == "dft" || name == "partial-dft") return MatrixModel::PartialDFT;
  return std::nullopt;
}

namespace {

using nlohmann::json;

SolverConfig parse_algorithm_entry(const json& j) {
  SolverConfig cfg;
  if (j.is_string()) return algorithm_config_from_id(j.get<std::string>());
  if (!j.is_object())
    throw SpecError("algorithm entries must be strings or objects");
  bool have_algorithm = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "algorithm") {
      const auto alg = algorithm_from_name(value.get<std::string>());
      if (!alg)
        throw SpecError("unknown algorithm: " + value.get<std::string>());
      cfg.algorithm = *alg;
      have_algorithm = true;
    } else if (key == "max_iters") {
      cfg.max_iters = value.get<int>();
    } else if (key == "rel_tol") {
      cfg.rel_tol = value.get<double>();
    } else if (key == "epsilon_guard") {
      cfg.epsilon_guard = value.get<double>();
    } else if (key == "power_steps") {
      cfg.power_steps = value.get<int>();
    } else if (key == "d_strategy") {
      const std::string s = value.get<std::string>();
      if (s == "lambda-max-phi") cfg.d_strategy = DStrategy::LambdaMaxPhi;
      else if (s == "lemma2") cfg.d_strategy = DStrategy::Lemma2Bound;
      else if (s == "fixed") cfg.d_strategy = DStrategy::Fixed;
      else throw SpecError("unknown d_strategy: " + s);
    } else if (key == "fixed_d") {
      cfg.fixed_d = value.get<double>();
    } else if (key == "wf_step") {
      const std::string s = value.get<std::string>();
      if (s == "heuristic") cfg.wf_step = WfStepRule::Heuristic;
      else if (s == "backtracking") cfg.wf_step = WfStepRule::Backtracking;
      else throw SpecError("unknown wf_step: " + s);
    } else if (key == "e_initial") {
      cfg.e_initial = value.get<double>();
    } else if (key == "accelerate") {
      cfg.accelerate = value.get<bool>();
    } else if (key == "apply_init_scale") {
      cfg.apply_init_scale = value.get<bool>();
    } else {
      throw SpecError("unknown algorithm key: " + key);
    }
  }
  if (!have_algorithm)
    throw SpecError("algorithm entries require an \"algorithm\" key");
  return cfg;
}

}  // namespace

ExperimentSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spec file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec parse error: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("spec file must hold a JSON object");

  ExperimentSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "matrix_model") {
        const auto m = matrix_model_from_name(value.get<std::string>());
        if (!m)
          throw SpecError("unknown matrix_model: " + value.get<std::string>());
        spec.matrix_model = *m;
      } else if (key == "K") {
        spec.K = value.get<int>();
      } else if (key == "N_values") {
        spec.N_values = value.get<std::vector<int>>();
      } else if (key == "trials") {
        spec.trials = value.get<int>();
      } else if (key == "noise_variance") {
        spec.noise_variance = value.get<double>();
      } else if (key == "algorithms") {
        if (!value.is_array())
          throw SpecError("algorithms must be an array");
        spec.algorithms.clear();
        for (const auto& entry : value)
          spec.algorithms.push_back(parse_algorithm_entry(entry));
      } else if (key == "master_seed") {
        spec.master_seed = value.get<std::uint64_t>();
      } else if (key == "success_threshold") {
        spec.success_threshold = value.get<double>();
      } else if (key == "output_dir") {
        spec.output_dir = value.get<std::string>();
      } else {
        throw SpecError("unknown spec key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec value error: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

}  // namespace phasemm
