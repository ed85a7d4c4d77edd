#include "qsopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsopt/circuit_text.hpp"
#include "qsopt/error.hpp"

namespace qsopt {

using nlohmann::json;

namespace {

// Reads members of one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name(key) + " has the wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    auto it = j_.find(key);
    return Section(it == j_.end() ? empty : *it, name(key));
  }

  /// Call once every key was read.
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + name(item.key().c_str()));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

void RunConfig::validate() const {
  if (episodes < 1 || episodes > 10000) throw ConfigError("episodes must lie in [1, 10000]");
  env.validate();
  agent.validate();
  if (initial_paths.empty()) {
    if (generate.family != "sensor" && generate.family != "ghz_sensor") {
      throw ConfigError("initial_circuits.generate.family must be \"sensor\" or \"ghz_sensor\", got \"" +
                        generate.family + "\"");
    }
    if (generate.count < 1) throw ConfigError("initial_circuits.generate.count must be at least 1");
    if (generate.gates < env.n_qubits || generate.gates > env.max_gates) {
      throw ConfigError("initial_circuits.generate.gates must lie in [env.n_qubits, env.max_gates]");
    }
  }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "");
  top.read("seed", cfg.seed);
  top.read("episodes", cfg.episodes);
  std::string out = cfg.output_dir.string();
  top.read("output_dir", out);
  cfg.output_dir = out;

  {
    Section s = top.child("env");
    s.read("n_qubits", cfg.env.n_qubits);
    s.read("max_gates", cfg.env.max_gates);
    s.read("max_steps", cfg.env.max_steps);
    s.read("threshold", cfg.env.threshold);
    s.read("auto_inject", cfg.env.auto_inject);
    s.read("invalid_penalty", cfg.env.invalid_penalty);
    s.read("angles", cfg.env.angles);
    s.finish();
  }
  {
    Section s = top.child("agent");
    AgentConfig& a = cfg.agent;
    s.read("gamma", a.gamma);
    s.read("memory_size", a.memory_size);
    s.read("batch_size", a.batch_size);
    s.read("epsilon_start", a.epsilon_start);
    s.read("epsilon_floor", a.epsilon_floor);
    s.read("epsilon_decay", a.epsilon_decay);
    s.read("learning_rate", a.learning_rate);
    s.read("lr_decay", a.lr_decay);
    s.read("plateau_patience", a.plateau_patience);
    s.read("plateau_factor", a.plateau_factor);
    s.read("plateau_window", a.plateau_window);
    s.read("target_sync_every", a.target_sync_every);
    s.read("entangling_weight", a.entangling_weight);
    s.finish();
  }
  {
    Section s = top.child("metrics");
    s.read("shots", cfg.env.shots);
    Section w = s.child("weights");
    w.read("qfi", cfg.env.weights.qfi);
    w.read("depth", cfg.env.weights.depth);
    w.read("entropy", cfg.env.weights.entropy);
    w.read("gates", cfg.env.weights.gates);
    w.finish();
    s.finish();
  }
  {
    Section s = top.child("simulator");
    std::string backend(backend_name(cfg.env.sim.backend));
    s.read("backend", backend);
    cfg.env.sim.backend = parse_backend(backend);
    s.read("chi_max", cfg.env.sim.mps.chi_max);
    s.read("trunc_tol", cfg.env.sim.mps.trunc_tol);
    s.read("max_dense_qubits", cfg.env.sim.max_dense_qubits);
    s.finish();
  }
  {
    Section s = top.child("noise");
    NoiseParams& p = cfg.env.sim.noise;
    s.read("enabled", p.enabled);
    s.read("p_meas", p.p_meas);
    s.read("p_1q", p.p_1q);
    s.read("p_2q", p.p_2q);
    s.read("t1_us", p.t1_us);
    s.read("t2_us", p.t2_us);
    s.read("dur_1q_us", p.dur_1q_us);
    s.read("dur_2q_us", p.dur_2q_us);
    s.read("during_training", p.during_training);
    s.read("trajectories", p.trajectories);
    s.finish();
  }
  {
    Section s = top.child("initial_circuits");
    std::vector<std::string> paths;
    s.read("paths", paths);
    for (const auto& p : paths) {
      std::filesystem::path path(p);
      cfg.initial_paths.push_back(path.is_relative() && !base_dir.empty() ? base_dir / path : path);
    }
    Section g = s.child("generate");
    g.read("family", cfg.generate.family);
    g.read("count", cfg.generate.count);
    g.read("gates", cfg.generate.gates);
    g.read("seed", cfg.generate.seed);
    g.finish();
    s.finish();
  }
  top.finish();
  if (cfg.output_dir.is_relative() && !base_dir.empty()) cfg.output_dir = base_dir / cfg.output_dir;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string run_config_to_json(const RunConfig& cfg) {
  const EnvConfig& e = cfg.env;
  const AgentConfig& a = cfg.agent;
  const NoiseParams& p = e.sim.noise;
  std::vector<std::string> paths;
  for (const auto& path : cfg.initial_paths) paths.push_back(path.string());
  json j = {
      {"seed", cfg.seed},
      {"episodes", cfg.episodes},
      {"output_dir", cfg.output_dir.string()},
      {"env",
       {{"n_qubits", e.n_qubits},
        {"max_gates", e.max_gates},
        {"max_steps", e.max_steps},
        {"threshold", e.threshold},
        {"auto_inject", e.auto_inject},
        {"invalid_penalty", e.invalid_penalty},
        {"angles", e.angles}}},
      {"agent",
       {{"gamma", a.gamma},
        {"memory_size", a.memory_size},
        {"batch_size", a.batch_size},
        {"epsilon_start", a.epsilon_start},
        {"epsilon_floor", a.epsilon_floor},
        {"epsilon_decay", a.epsilon_decay},
        {"learning_rate", a.learning_rate},
        {"lr_decay", a.lr_decay},
        {"plateau_patience", a.plateau_patience},
        {"plateau_factor", a.plateau_factor},
        {"plateau_window", a.plateau_window},
        {"target_sync_every", a.target_sync_every},
        {"entangling_weight", a.entangling_weight}}},
      {"metrics",
       {{"shots", e.shots},
        {"weights",
         {{"qfi", e.weights.qfi}, {"depth", e.weights.depth}, {"entropy", e.weights.entropy}, {"gates", e.weights.gates}}}}},
      {"simulator",
       {{"backend", std::string(backend_name(e.sim.backend))},
        {"chi_max", e.sim.mps.chi_max},
        {"trunc_tol", e.sim.mps.trunc_tol},
        {"max_dense_qubits", e.sim.max_dense_qubits}}},
      {"noise",
       {{"enabled", p.enabled},
        {"p_meas", p.p_meas},
        {"p_1q", p.p_1q},
        {"p_2q", p.p_2q},
        {"t1_us", p.t1_us},
        {"t2_us", p.t2_us},
        {"dur_1q_us", p.dur_1q_us},
        {"dur_2q_us", p.dur_2q_us},
        {"during_training", p.during_training},
        {"trajectories", p.trajectories}}},
      {"initial_circuits",
       {{"paths", paths},
        {"generate",
         {{"family", cfg.generate.family},
          {"count", cfg.generate.count}, {"gates", cfg.generate.gates}, {"seed", cfg.generate.seed}}}}},
  };
  return j.dump(2) + "\n";
}

std::vector<Circuit> initial_circuits(const RunConfig& cfg) {
  std::vector<Circuit> out;
  if (!cfg.initial_paths.empty()) {
    for (const auto& p : cfg.initial_paths) out.push_back(load_circuit(p));
    return out;
  }
  const auto build = cfg.generate.family == "ghz_sensor" ? ghz_sensor_circuit : sensor_circuit;
  for (int i = 0; i < cfg.generate.count; ++i) {
    out.push_back(build(cfg.env.n_qubits, cfg.generate.gates,
                        derive_seed(cfg.generate.seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

}  // namespace qsopt
