#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vqopt/optimizers.hpp"
#include "vqopt/problems.hpp"

namespace vqopt {

enum class OptimizerKind { GD, Adam, QNG, VarQITE, QBroyden, QBang, MomentumQNG };

/// Optimizer plus the metric it uses: the QNG mode, or the F_0 initialization
/// of qBroyden/qBang.
struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::QBang;
  MetricKind metric = MetricKind::BlockDiagonal;

  /// Accepts gd, adam, qng_block, qng_full, varqite, momentum_qng and
  /// {qbroyden,qbang}_{full,block,identity}. Throws ConfigError.
  static OptimizerSpec parse(std::string_view name);
  std::string name() const;

  bool uses_metric_state() const noexcept {
    return kind == OptimizerKind::QBroyden || kind == OptimizerKind::QBang;
  }
};

/// Charges one kernel call adds to the counter.
EvalCounter step_charge(const OptimizerSpec& spec, const CircuitIR& circuit);

/// Charges of the one-off metric initialization.
EvalCounter init_charge(const OptimizerSpec& spec, const CircuitIR& circuit);

struct ProblemSpec {
  std::string kind = "barren_plateau";  // barren_plateau | qaoa | chemistry
  std::size_t n_qubits = 9;
  std::size_t n_layers = 4;
  std::uint64_t axis_seed = 0;
  std::optional<std::filesystem::path> graph_path;
  // Random graph used when no graph file is given.
  std::size_t graph_vertices = 8;
  double graph_edge_probability = 0.5;
  std::uint64_t graph_seed = 0;
  std::optional<std::filesystem::path> hamiltonian_path;
  std::map<std::string, std::filesystem::path> observable_paths;
};

ProblemInstance build_problem(const ProblemSpec& spec);

struct ExperimentConfig {
  ProblemSpec problem;
  OptimizerSpec optimizer;
  Hyperparameters hp;
  std::size_t n_seeds = 25;
  std::size_t max_steps = 1100;
  /// Falls back to the instance's own mode.
  std::optional<InitMode> init_mode;
  std::optional<RealVector> fixed_params;
  double hf_sigma = kHartreeFockSigma;
  /// Recompute F_0 from the current parameters after a filter breakdown
  /// instead of failing the trajectory.
  bool reinit_on_breakdown = false;
  /// Worker threads; 0 means hardware concurrency.
  std::size_t threads = 0;
  double ratio_threshold = 0.99;

  /// Throws ConfigError when a value is outside its documented range.
  void validate() const;
};

struct TrajectoryRow {
  std::size_t step = 0;
  /// Cumulative circuit evaluations after this row's evaluation.
  std::uint64_t evals = 0;
  /// L(theta_step).
  double energy = 0.0;
  double grad_norm = 0.0;
  double update_norm = 0.0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<TrajectoryRow> rows;
  RealVector initial_params;
  double best_energy = 0.0;
  RealVector best_params;
  bool converged = false;
  bool failed = false;
  std::string failure;
  std::size_t reinitializations = 0;
  EvalCounter counter;

  std::uint64_t total_evals() const noexcept { return counter.total(); }
};

/// One seeded optimization. Row k holds L(theta_k) and the counter after the
/// step that evaluated it; the loop stops at max_steps or on convergence.
/// Numerical failures are recorded in the returned record, not thrown.
TrajectoryRecord run_trajectory(const ExperimentConfig& config, const ProblemInstance& instance,
                                std::uint64_t seed);

struct AggregateRow {
  std::size_t step = 0;
  double evals_mean = 0.0;
  double energy_mean = 0.0;
  /// Population variance over contributing seeds.
  double energy_var = 0.0;
  std::size_t n_seeds = 0;
};

struct EvalsToRatio {
  /// Mean over the seeds that reached the threshold.
  std::optional<double> mean_evals;
  double reach_fraction = 0.0;
};

struct Summary {
  std::string optimizer;
  std::size_t n_seeds = 0;
  std::size_t failures = 0;
  EvalsToRatio to_ratio;
  std::optional<double> best_ratio;
  std::optional<double> mean_best_ratio;
  double mean_best_energy = 0.0;
};

struct ExperimentReport {
  OptimizerSpec optimizer;
  Hyperparameters hp;
  std::vector<TrajectoryRecord> records;  // sorted by seed
  std::vector<AggregateRow> aggregate;
  Summary summary;
};

/// r = (E_opt - E_max) / (E_min - E_max). Throws NumericalError if E_min == E_max.
double approximation_ratio(double e_opt, double e_min, double e_max);

/// First cumulative evaluation count at which the running-best energy reaches
/// ratio >= threshold. Throws ConfigError on a threshold outside (0, 1].
std::optional<std::uint64_t> evals_to_ratio(const TrajectoryRecord& record, const SpectralBounds& bounds,
                                            double threshold);
/// Over the non-failed records.
EvalsToRatio evals_to_ratio(const std::vector<TrajectoryRecord>& records, const SpectralBounds& bounds,
                            double threshold);

/// Per-step mean and variance over the non-failed records.
std::vector<AggregateRow> aggregate(const std::vector<TrajectoryRecord>& records);

/// Seeds 0..n_seeds-1 across worker threads. Throws Error if every seed
/// failed, unless allow_all_failed is set.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProblemInstance& instance,
                                bool allow_all_failed = false);

struct SweepEntry {
  double eta = 0.0;
  ExperimentReport report;
};

/// One experiment per step size. Failed seeds are recorded, never thrown.
std::vector<SweepEntry> sweep_step_size(const ExperimentConfig& config, const ProblemInstance& instance,
                                        const std::vector<double>& etas);

struct ObservableRow {
  std::string optimizer;
  std::uint64_t seed = 0;
  std::string observable;
  double value = 0.0;
};

/// <O> at each non-failed record's best parameters for the Hamiltonian (as
/// "H") and every named observable of the instance.
std::vector<ObservableRow> best_state_observables(const ExperimentReport& report, const ProblemInstance& instance);

// CSV emission. Numbers are written with 17 significant digits in the
// classic locale; NaN is written as "nan".
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries);
/// Columns optimizer,eta,step,evals_mean,energy_mean,ratio_mean,n_seeds,failures;
/// ratio_mean is the ratio of the mean energy.
void write_sweep_csv(std::ostream& out, const std::vector<SweepEntry>& sweep, const SpectralBounds& bounds);

void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows);

/// Writes `contents` to `path`, creating parent directories. Throws Error.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Renders through `writer(std::ostream&)` and writes the result to `path`.
template <class Writer>
void emit_csv(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  write_file(path, out.str());
}

}  // namespace vqopt
