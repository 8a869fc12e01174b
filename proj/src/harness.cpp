#include "vqopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <thread>

#include "vqopt/error.hpp"

namespace vqopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MetricSuffix {
  std::string_view suffix;
  MetricKind kind;
};
constexpr MetricSuffix kSuffixes[] = {
    {"_full", MetricKind::Full}, {"_block", MetricKind::BlockDiagonal}, {"_identity", MetricKind::Identity}};

std::string_view metric_suffix(MetricKind kind) {
  for (const auto& s : kSuffixes) {
    if (s.kind == kind) return s.suffix;
  }
  return "";
}

/// Per-trajectory optimizer state.
struct Optimizer {
  const ExperimentConfig& config;
  const ProblemInstance& instance;
  AdamState adam;
  MetricState metric;

  Optimizer(const ExperimentConfig& c, const ProblemInstance& inst)
      : config(c), instance(inst), adam(AdamState::fresh(inst.circuit.n_params(), c.hp)) {}

  void init_metric(const RealVector& theta, EvalCounter& counter) {
    const auto& hp = config.hp;
    metric = initialize_metric(instance.circuit, theta, config.optimizer.metric, counter, hp.eps0, hp.eta,
                               hp.step_scaling);
  }

  StepResult step(const RealVector& theta, EvalCounter& counter) {
    const auto& c = instance.circuit;
    const auto& h = instance.hamiltonian;
    const auto& hp = config.hp;
    switch (config.optimizer.kind) {
      case OptimizerKind::GD: return gd_step(c, h, theta, hp.eta, hp.gamma, counter);
      case OptimizerKind::Adam: return adam_step(c, h, theta, adam, hp.eta, hp.gamma, counter);
      case OptimizerKind::QNG: return qng_step(c, h, theta, hp.eta, hp.gamma, counter, config.optimizer.metric);
      case OptimizerKind::VarQITE: return varqite_step(c, h, theta, hp.eta, hp.gamma, counter);
      case OptimizerKind::QBroyden: return qbroyden_step(c, h, theta, metric, hp.gamma, counter);
      case OptimizerKind::QBang: return qbang_step(c, h, theta, adam, metric, hp.gamma, counter);
      case OptimizerKind::MomentumQNG: return momentum_qng_step(c, h, theta, adam, hp.eta, hp.gamma, counter);
    }
    throw Error("unknown optimizer");
  }
};

EvalCounter& operator+=(EvalCounter& a, const EvalCounter& b) {
  a.cost += b.cost;
  a.gradient += b.gradient;
  a.qfim_full += b.qfim_full;
  a.qfim_block += b.qfim_block;
  return a;
}

void put(std::ostream& out, double x) {
  if (std::isnan(x)) {
    out << "nan";
  } else {
    out << x;
  }
}

void prepare(std::ostream& out) {
  out.imbue(std::locale::classic());
  out.precision(17);
}

}  // namespace

OptimizerSpec OptimizerSpec::parse(std::string_view name) {
  if (name == "gd") return {OptimizerKind::GD, MetricKind::Identity};
  if (name == "adam") return {OptimizerKind::Adam, MetricKind::Identity};
  if (name == "varqite") return {OptimizerKind::VarQITE, MetricKind::Full};
  if (name == "momentum_qng") return {OptimizerKind::MomentumQNG, MetricKind::Full};
  if (name == "qng_full") return {OptimizerKind::QNG, MetricKind::Full};
  if (name == "qng_block") return {OptimizerKind::QNG, MetricKind::BlockDiagonal};
  for (const auto& [prefix, kind] : {std::pair{std::string_view("qbroyden"), OptimizerKind::QBroyden},
                                     std::pair{std::string_view("qbang"), OptimizerKind::QBang}}) {
    if (!name.starts_with(prefix)) continue;
    for (const auto& s : kSuffixes) {
      if (name.substr(prefix.size()) == s.suffix) return {kind, s.kind};
    }
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

std::string OptimizerSpec::name() const {
  switch (kind) {
    case OptimizerKind::GD: return "gd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::VarQITE: return "varqite";
    case OptimizerKind::MomentumQNG: return "momentum_qng";
    case OptimizerKind::QNG: return "qng" + std::string(metric_suffix(metric));
    case OptimizerKind::QBroyden: return "qbroyden" + std::string(metric_suffix(metric));
    case OptimizerKind::QBang: return "qbang" + std::string(metric_suffix(metric));
  }
  return "?";
}

EvalCounter step_charge(const OptimizerSpec& spec, const CircuitIR& circuit) {
  const std::uint64_t n = circuit.n_params();
  EvalCounter c{1, 2 * n, 0, 0};
  switch (spec.kind) {
    case OptimizerKind::QNG:
      if (spec.metric == MetricKind::Full) c.qfim_full = n * n;
      else c.qfim_block = n + circuit.n_layers();
      break;
    case OptimizerKind::VarQITE:
    case OptimizerKind::MomentumQNG: c.qfim_full = n * n; break;
    default: break;
  }
  return c;
}

EvalCounter init_charge(const OptimizerSpec& spec, const CircuitIR& circuit) {
  EvalCounter c;
  if (!spec.uses_metric_state()) return c;
  const std::uint64_t n = circuit.n_params();
  if (spec.metric == MetricKind::Full) c.qfim_full = n * n;
  if (spec.metric == MetricKind::BlockDiagonal) c.qfim_block = n + circuit.n_layers();
  return c;
}

ProblemInstance build_problem(const ProblemSpec& spec) {
  if (spec.kind == "barren_plateau") return build_barren_plateau(spec.n_qubits, spec.n_layers, spec.axis_seed);
  if (spec.kind == "qaoa") {
    Graph g;
    if (spec.graph_path) {
      std::ifstream in(*spec.graph_path);
      if (!in) throw Error("cannot open " + spec.graph_path->string());
      std::ostringstream ss;
      ss << in.rdbuf();
      try {
        g = parse_graph(ss.str());
      } catch (const ParseError& e) {
        throw Error(spec.graph_path->string() + ": " + e.what());
      }
    } else {
      g = random_graph(spec.graph_vertices, spec.graph_edge_probability, spec.graph_seed);
    }
    return build_qaoa(g, spec.n_layers);
  }
  if (spec.kind == "chemistry") {
    if (!spec.hamiltonian_path) throw ConfigError("chemistry problem needs a hamiltonian file");
    return load_problem(*spec.hamiltonian_path, spec.observable_paths, spec.n_layers);
  }
  throw ConfigError("unknown problem kind '" + spec.kind + "'");
}

void ExperimentConfig::validate() const {
  if (!(hp.eta > 0.0) || !std::isfinite(hp.eta)) throw ConfigError("eta must be positive");
  if (!(hp.eps0 >= 0.0 && hp.eps0 < 1.0)) throw ConfigError("eps0 must lie in [0, 1)");
  if (!(hp.gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (!(hp.beta1 > 0.0 && hp.beta1 < 1.0) || !(hp.beta2 > 0.0 && hp.beta2 < 1.0)) {
    throw ConfigError("beta1 and beta2 must lie in (0, 1)");
  }
  if (!(hp.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (n_seeds == 0) throw ConfigError("n_seeds must be positive");
  if (!(hf_sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) throw ConfigError("ratio threshold must lie in (0, 1]");
  if (optimizer.kind == OptimizerKind::QNG && optimizer.metric == MetricKind::Identity) {
    throw ConfigError("QNG needs a full or block metric");
  }
}

TrajectoryRecord run_trajectory(const ExperimentConfig& config, const ProblemInstance& instance,
                                std::uint64_t seed) {
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.best_energy = std::numeric_limits<double>::infinity();
  auto& counter = rec.counter;
  Optimizer opt(config, instance);

  auto record_row = [&](std::size_t step, double energy, double grad_norm, double update_norm,
                        const RealVector& theta) {
    rec.rows.push_back({step, counter.total(), energy, grad_norm, update_norm});
    if (energy < rec.best_energy) {
      rec.best_energy = energy;
      rec.best_params = theta;
    }
  };

  RealVector theta;
  try {
    theta = initial_params(instance, config.init_mode.value_or(instance.init_mode), seed, config.fixed_params,
                           config.hf_sigma);
    rec.initial_params = theta;
    if (config.optimizer.uses_metric_state()) opt.init_metric(theta, counter);

    if (config.max_steps == 0) {
      const double e = cost(instance.circuit, instance.hamiltonian, theta, counter);
      record_row(0, e, kNaN, kNaN, theta);
    }
    for (std::size_t k = 0; k < config.max_steps; ++k) {
      StepResult r;
      try {
        r = opt.step(theta, counter);
      } catch (const FilterBreakdown&) {
        if (!config.reinit_on_breakdown) throw;
        // The kernel left every state untouched; restart the metric here.
        opt.init_metric(theta, counter);
        ++rec.reinitializations;
        r = opt.step(theta, counter);
      }
      if (r.converged) {
        // The gate leaves the counter alone, but the evaluation still happened.
        counter += step_charge(config.optimizer, instance.circuit);
        record_row(k, r.energy, r.grad_norm, r.update_norm, theta);
        rec.converged = true;
        break;
      }
      record_row(k, r.energy, r.grad_norm, r.update_norm, theta);
      theta = std::move(r.new_params);
    }
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  if (rec.best_params.size() == 0) rec.best_params = rec.initial_params;
  return rec;
}

double approximation_ratio(double e_opt, double e_min, double e_max) {
  if (e_min == e_max) throw NumericalError("approximation ratio undefined for E_min == E_max");
  return (e_opt - e_max) / (e_min - e_max);
}

std::optional<std::uint64_t> evals_to_ratio(const TrajectoryRecord& record, const SpectralBounds& bounds,
                                            double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : record.rows) {
    best = std::min(best, row.energy);
    if (approximation_ratio(best, bounds.e_min, bounds.e_max) >= threshold) return row.evals;
  }
  return std::nullopt;
}

EvalsToRatio evals_to_ratio(const std::vector<TrajectoryRecord>& records, const SpectralBounds& bounds,
                            double threshold) {
  EvalsToRatio out;
  double sum = 0.0;
  std::size_t reached = 0;
  std::size_t considered = 0;
  for (const auto& r : records) {
    if (r.failed) continue;
    ++considered;
    if (auto e = evals_to_ratio(r, bounds, threshold)) {
      sum += static_cast<double>(*e);
      ++reached;
    }
  }
  if (reached > 0) out.mean_evals = sum / static_cast<double>(reached);
  if (considered > 0) out.reach_fraction = static_cast<double>(reached) / static_cast<double>(considered);
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TrajectoryRecord>& records) {
  std::size_t longest = 0;
  for (const auto& r : records) {
    if (!r.failed) longest = std::max(longest, r.rows.size());
  }
  std::vector<AggregateRow> out;
  out.reserve(longest);
  for (std::size_t k = 0; k < longest; ++k) {
    AggregateRow row;
    row.step = k;
    double evals = 0.0, sum = 0.0;
    for (const auto& r : records) {
      if (r.failed || k >= r.rows.size()) continue;
      evals += static_cast<double>(r.rows[k].evals);
      sum += r.rows[k].energy;
      ++row.n_seeds;
    }
    const auto n = static_cast<double>(row.n_seeds);
    row.evals_mean = evals / n;
    row.energy_mean = sum / n;
    double var = 0.0;
    for (const auto& r : records) {
      if (r.failed || k >= r.rows.size()) continue;
      const double d = r.rows[k].energy - row.energy_mean;
      var += d * d;
    }
    row.energy_var = var / n;
    out.push_back(row);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProblemInstance& instance,
                                bool allow_all_failed) {
  config.validate();
  ExperimentReport report{config.optimizer, config.hp, {}, {}, {}};
  report.records.resize(config.n_seeds);

  std::size_t workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.n_seeds);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.n_seeds; i = next++) {
      report.records[i] = run_trajectory(config, instance, i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  auto& s = report.summary;
  s.optimizer = config.optimizer.name();
  s.n_seeds = config.n_seeds;
  double best_sum = 0.0;
  for (const auto& r : report.records) {
    if (r.failed) {
      ++s.failures;
    } else {
      best_sum += r.best_energy;
    }
  }
  if (s.failures == s.n_seeds && !allow_all_failed) {
    throw Error("all " + std::to_string(s.n_seeds) + " trajectories failed: " + report.records.front().failure);
  }
  const auto ok = s.n_seeds - s.failures;
  s.mean_best_energy = ok > 0 ? best_sum / static_cast<double>(ok) : kNaN;
  if (instance.bounds && ok > 0) {
    const auto& b = *instance.bounds;
    s.to_ratio = evals_to_ratio(report.records, b, config.ratio_threshold);
    double best = -std::numeric_limits<double>::infinity(), sum = 0.0;
    for (const auto& r : report.records) {
      if (r.failed) continue;
      const double ratio = approximation_ratio(r.best_energy, b.e_min, b.e_max);
      best = std::max(best, ratio);
      sum += ratio;
    }
    s.best_ratio = best;
    s.mean_best_ratio = sum / static_cast<double>(ok);
  }
  report.aggregate = aggregate(report.records);
  return report;
}

std::vector<SweepEntry> sweep_step_size(const ExperimentConfig& config, const ProblemInstance& instance,
                                        const std::vector<double>& etas) {
  if (etas.empty()) throw ConfigError("step-size sweep needs at least one eta");
  std::vector<SweepEntry> out;
  for (double eta : etas) {
    ExperimentConfig c = config;
    c.hp.eta = eta;
    out.push_back({eta, run_experiment(c, instance, true)});
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  prepare(out);
  out << "seed,step,evals,energy,grad_norm,update_norm\n";
  for (const auto& r : records) {
    for (const auto& row : r.rows) {
      out << r.seed << ',' << row.step << ',' << row.evals << ',';
      put(out, row.energy);
      out << ',';
      put(out, row.grad_norm);
      out << ',';
      put(out, row.update_norm);
      out << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  prepare(out);
  out << "step,evals_mean,energy_mean,energy_var,n_seeds\n";
  for (const auto& row : rows) {
    out << row.step << ',';
    put(out, row.evals_mean);
    out << ',';
    put(out, row.energy_mean);
    out << ',';
    put(out, row.energy_var);
    out << ',' << row.n_seeds << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries) {
  prepare(out);
  out << "optimizer,n_seeds,failures,mean_evals_to_ratio,reach_fraction,best_ratio,mean_best_ratio,"
         "mean_best_energy\n";
  for (const auto& s : summaries) {
    out << s.optimizer << ',' << s.n_seeds << ',' << s.failures << ',';
    put(out, s.to_ratio.mean_evals.value_or(kNaN));
    out << ',';
    put(out, s.to_ratio.reach_fraction);
    out << ',';
    put(out, s.best_ratio.value_or(kNaN));
    out << ',';
    put(out, s.mean_best_ratio.value_or(kNaN));
    out << ',';
    put(out, s.mean_best_energy);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepEntry>& sweep, const SpectralBounds& bounds) {
  prepare(out);
  out << "optimizer,eta,step,evals_mean,energy_mean,ratio_mean,n_seeds,failures\n";
  for (const auto& entry : sweep) {
    for (const auto& row : entry.report.aggregate) {
      out << entry.report.optimizer.name() << ',';
      put(out, entry.eta);
      out << ',' << row.step << ',';
      put(out, row.evals_mean);
      out << ',';
      put(out, row.energy_mean);
      out << ',';
      put(out, approximation_ratio(row.energy_mean, bounds.e_min, bounds.e_max));
      out << ',' << row.n_seeds << ',' << entry.report.summary.failures << '\n';
    }
  }
}

std::vector<ObservableRow> best_state_observables(const ExperimentReport& report, const ProblemInstance& instance) {
  std::vector<ObservableRow> rows;
  const auto name = report.optimizer.name();
  for (const auto& r : report.records) {
    if (r.failed) continue;
    const auto state = run_circuit(instance.circuit, as_span(r.best_params));
    rows.push_back({name, r.seed, "H", expectation(state, instance.hamiltonian)});
    for (const auto& [obs_name, obs] : instance.observables) {
      rows.push_back({name, r.seed, obs_name, expectation(state, obs)});
    }
  }
  return rows;
}

void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows) {
  prepare(out);
  out << "optimizer,seed,observable,value\n";
  for (const auto& row : rows) {
    out << row.optimizer << ',' << row.seed << ',' << row.observable << ',';
    put(out, row.value);
    out << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace vqopt
