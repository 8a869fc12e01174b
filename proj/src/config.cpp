#include "vqopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "vqopt/error.hpp"

namespace vqopt {

namespace {

std::string where(const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

void require_map(const YAML::Node& node, std::string_view name) {
  if (!node.IsMap()) throw ConfigError(std::string(name) + " must be a mapping" + where(node));
}

void check_keys(const YAML::Node& node, std::string_view section, std::initializer_list<std::string_view> allowed) {
  require_map(node, section);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(section) + where(kv.first));
    }
  }
}

template <class T>
T get(const YAML::Node& node, std::string_view key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "'" + where(node));
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out) {
  if (const auto n = parent[key]) out = get<T>(n, key);
}

std::size_t read_count(const YAML::Node& node, std::string_view key) {
  const auto v = get<long long>(node, key);
  if (v < 0) throw ConfigError("'" + std::string(key) + "' must be non-negative" + where(node));
  return static_cast<std::size_t>(v);
}

void read_count(const YAML::Node& parent, const char* key, std::size_t& out) {
  if (const auto n = parent[key]) out = read_count(n, key);
}

void read_seed(const YAML::Node& parent, const char* key, std::uint64_t& out) {
  if (const auto n = parent[key]) out = read_count(n, key);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

ProblemSpec parse_problem(const YAML::Node& node, const std::filesystem::path& base) {
  check_keys(node, "problem",
             {"kind", "n_qubits", "n_layers", "axis_seed", "graph", "random_graph", "hamiltonian", "observables"});
  ProblemSpec p;
  read(node, "kind", p.kind);
  if (p.kind != "barren_plateau" && p.kind != "qaoa" && p.kind != "chemistry") {
    throw ConfigError("unknown problem kind '" + p.kind + "'" + where(node["kind"]));
  }
  read_count(node, "n_qubits", p.n_qubits);
  read_count(node, "n_layers", p.n_layers);
  read_seed(node, "axis_seed", p.axis_seed);
  if (const auto g = node["graph"]) p.graph_path = resolve(base, get<std::string>(g, "graph"));
  if (const auto g = node["random_graph"]) {
    check_keys(g, "random_graph", {"n_vertices", "edge_probability", "seed"});
    read_count(g, "n_vertices", p.graph_vertices);
    read(g, "edge_probability", p.graph_edge_probability);
    read_seed(g, "seed", p.graph_seed);
  }
  if (const auto h = node["hamiltonian"]) p.hamiltonian_path = resolve(base, get<std::string>(h, "hamiltonian"));
  if (const auto obs = node["observables"]) {
    require_map(obs, "observables");
    for (const auto& kv : obs) {
      p.observable_paths[kv.first.as<std::string>()] = resolve(base, get<std::string>(kv.second, "observables"));
    }
  }
  if (p.kind == "chemistry" && !p.hamiltonian_path) throw ConfigError("chemistry problem needs 'hamiltonian'");
  if (p.n_layers == 0) throw ConfigError("n_layers must be positive");
  return p;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("invalid YAML: ") + e.what());
  }
  check_keys(root, "config",
             {"problem", "optimizer", "optimizers", "hyperparameters", "n_seeds", "max_steps", "init",
              "reinit_on_breakdown", "threads", "ratio_threshold", "sweep_etas", "output_dir"});

  RunConfig rc;
  auto& c = rc.base;
  if (!root["problem"]) throw ConfigError("missing 'problem' section");
  c.problem = parse_problem(root["problem"], base_dir);

  if (root["optimizer"] && root["optimizers"]) throw ConfigError("give either 'optimizer' or 'optimizers'");
  if (const auto o = root["optimizer"]) rc.optimizers.push_back(OptimizerSpec::parse(get<std::string>(o, "optimizer")));
  if (const auto o = root["optimizers"]) {
    for (const auto& name : get<std::vector<std::string>>(o, "optimizers")) {
      rc.optimizers.push_back(OptimizerSpec::parse(name));
    }
  }
  if (rc.optimizers.empty()) throw ConfigError("no optimizer given");
  c.optimizer = rc.optimizers.front();

  if (const auto hp = root["hyperparameters"]) {
    check_keys(hp, "hyperparameters", {"eta", "eps0", "beta1", "beta2", "kappa", "gamma", "step_scaling"});
    read(hp, "eta", c.hp.eta);
    read(hp, "eps0", c.hp.eps0);
    read(hp, "beta1", c.hp.beta1);
    read(hp, "beta2", c.hp.beta2);
    read(hp, "kappa", c.hp.kappa);
    read(hp, "gamma", c.hp.gamma);
    read(hp, "step_scaling", c.hp.step_scaling);
  }
  read_count(root, "n_seeds", c.n_seeds);
  read_count(root, "max_steps", c.max_steps);
  read_count(root, "threads", c.threads);
  read(root, "reinit_on_breakdown", c.reinit_on_breakdown);
  read(root, "ratio_threshold", c.ratio_threshold);
  if (const auto init = root["init"]) {
    check_keys(init, "init", {"mode", "sigma", "params"});
    if (const auto m = init["mode"]) c.init_mode = parse_init_mode(get<std::string>(m, "mode"));
    read(init, "sigma", c.hf_sigma);
    if (const auto p = init["params"]) {
      const auto v = get<std::vector<double>>(p, "params");
      c.fixed_params = Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (c.init_mode == InitMode::Fixed && !c.fixed_params) throw ConfigError("fixed init needs 'params'");
  }
  read(root, "sweep_etas", rc.sweep_etas);
  if (const auto o = root["output_dir"]) rc.output_dir = resolve(base_dir, get<std::string>(o, "output_dir"));

  for (const auto& spec : rc.optimizers) rc.for_optimizer(spec).validate();
  for (double eta : rc.sweep_etas) {
    if (!(eta > 0.0)) throw ConfigError("sweep_etas must be positive");
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace vqopt
