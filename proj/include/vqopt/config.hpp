#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "vqopt/harness.hpp"

namespace vqopt {

/// Contents of a YAML experiment file: one ExperimentConfig template, the
/// optimizers to run it with, and optional sweep step sizes.
struct RunConfig {
  ExperimentConfig base;
  std::vector<OptimizerSpec> optimizers;
  std::vector<double> sweep_etas;
  std::filesystem::path output_dir = "out";

  /// `base` with the optimizer replaced.
  ExperimentConfig for_optimizer(const OptimizerSpec& spec) const {
    ExperimentConfig c = base;
    c.optimizer = spec;
    return c;
  }
};

/// Parses YAML text. Relative paths resolve against `base_dir`. Unknown keys,
/// wrong types and out-of-range values throw ConfigError.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace vqopt
