// Command-line driver: run experiments, step-size sweeps, exact bounds and
// random graph generation.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "vqopt/config.hpp"
#include "vqopt/error.hpp"
#include "vqopt/harness.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void print_summary(const vqopt::Summary& s) {
  std::printf("%-18s seeds=%zu failures=%zu mean_best_energy=%.10g", s.optimizer.c_str(), s.n_seeds, s.failures,
              s.mean_best_energy);
  if (s.best_ratio) std::printf(" best_ratio=%.6f mean_best_ratio=%.6f", *s.best_ratio, *s.mean_best_ratio);
  if (s.to_ratio.mean_evals) {
    std::printf(" evals_to_ratio=%.1f reach=%.2f", *s.to_ratio.mean_evals, s.to_ratio.reach_fraction);
  }
  std::printf("\n");
}

int cmd_run(const std::string& config_path, const std::string& output_dir, std::size_t threads) {
  auto rc = vqopt::load_run_config(config_path);
  if (!output_dir.empty()) rc.output_dir = output_dir;
  if (threads != 0) rc.base.threads = threads;
  const auto instance = vqopt::build_problem(rc.base.problem);

  std::vector<vqopt::Summary> summaries;
  std::vector<vqopt::ObservableRow> observables;
  for (const auto& spec : rc.optimizers) {
    const auto report = vqopt::run_experiment(rc.for_optimizer(spec), instance);
    const auto name = spec.name();
    vqopt::emit_csv(rc.output_dir / (name + "_trajectory.csv"),
                    [&](std::ostream& out) { vqopt::write_trajectory_csv(out, report.records); });
    vqopt::emit_csv(rc.output_dir / (name + "_aggregate.csv"),
                    [&](std::ostream& out) { vqopt::write_aggregate_csv(out, report.aggregate); });
    print_summary(report.summary);
    summaries.push_back(report.summary);
    if (!instance.observables.empty()) {
      auto rows = vqopt::best_state_observables(report, instance);
      observables.insert(observables.end(), rows.begin(), rows.end());
    }
  }
  vqopt::emit_csv(rc.output_dir / "summary.csv",
                  [&](std::ostream& out) { vqopt::write_summary_csv(out, summaries); });
  if (!observables.empty()) {
    vqopt::emit_csv(rc.output_dir / "observables.csv",
                    [&](std::ostream& out) { vqopt::write_observables_csv(out, observables); });
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& output_dir, std::vector<double> etas,
              std::size_t threads) {
  auto rc = vqopt::load_run_config(config_path);
  if (!output_dir.empty()) rc.output_dir = output_dir;
  if (threads != 0) rc.base.threads = threads;
  if (etas.empty()) etas = rc.sweep_etas;
  if (etas.empty()) throw vqopt::ConfigError("no step sizes: set sweep_etas or pass --eta");
  const auto instance = vqopt::build_problem(rc.base.problem);
  if (!instance.bounds) throw vqopt::ConfigError("sweep needs a problem with exact bounds");

  std::vector<vqopt::SweepEntry> all;
  std::vector<vqopt::Summary> summaries;
  for (const auto& spec : rc.optimizers) {
    for (auto& entry : vqopt::sweep_step_size(rc.for_optimizer(spec), instance, etas)) {
      auto s = entry.report.summary;
      s.optimizer += "@" + std::to_string(entry.eta);
      print_summary(s);
      summaries.push_back(s);
      all.push_back(std::move(entry));
    }
  }
  vqopt::emit_csv(rc.output_dir / "sweep.csv",
                  [&](std::ostream& out) { vqopt::write_sweep_csv(out, all, *instance.bounds); });
  vqopt::emit_csv(rc.output_dir / "sweep_summary.csv",
                  [&](std::ostream& out) { vqopt::write_summary_csv(out, summaries); });
  return 0;
}

int cmd_bounds(const std::string& path) {
  const auto file = vqopt::read_pauli_file(path);
  const auto b = vqopt::exact_bounds(file.sum);
  std::printf("n_qubits=%zu terms=%zu\nE_min=%.12f\nE_max=%.12f\n", file.sum.n_qubits(), file.sum.terms().size(),
              b.e_min, b.e_max);
  return 0;
}

int cmd_gen_graph(std::size_t n, double p, std::uint64_t seed, const std::string& out) {
  const auto text = vqopt::format_graph(vqopt::random_graph(n, p, seed));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    vqopt::write_file(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statevector simulator and metric-informed optimizers for variational circuits"};
  app.require_subcommand(1);

  std::string config_path, output_dir, path, out;
  std::size_t threads = 0;
  std::vector<double> etas;
  std::size_t n_vertices = 8;
  double probability = 0.5;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run every optimizer of a config file");
  run->add_option("config", config_path, "YAML experiment file")->required();
  run->add_option("-o,--output-dir", output_dir, "Override output_dir");
  run->add_option("-j,--threads", threads, "Worker threads");

  auto* sweep = app.add_subcommand("sweep", "Step-size sweep");
  sweep->add_option("config", config_path, "YAML experiment file")->required();
  sweep->add_option("-o,--output-dir", output_dir, "Override output_dir");
  sweep->add_option("--eta", etas, "Step sizes (overrides sweep_etas)");
  sweep->add_option("-j,--threads", threads, "Worker threads");

  auto* bounds = app.add_subcommand("bounds", "Exact extremal eigenvalues of a Pauli file");
  bounds->add_option("file", path, "Pauli-sum file")->required();

  auto* gen = app.add_subcommand("gen-graph", "Write a random G(n, p) graph");
  gen->add_option("-n,--vertices", n_vertices, "Vertex count")->check(CLI::Range(2, 64));
  gen->add_option("-p,--probability", probability, "Edge probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("-s,--seed", seed, "Seed");
  gen->add_option("-o,--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, output_dir, threads);
    if (*sweep) return cmd_sweep(config_path, output_dir, etas, threads);
    if (*bounds) return cmd_bounds(path);
    if (*gen) return cmd_gen_graph(n_vertices, probability, seed, out);
  } catch (const vqopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
