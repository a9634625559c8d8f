#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "lcl/lab.hpp"

namespace lcl {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::lyapunov: return "lyapunov";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::malliavin: return "malliavin";
    case ExperimentKind::spanning: return "spanning";
    case ExperimentKind::validate: return "validate";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::simulate, ExperimentKind::lyapunov, ExperimentKind::spectrum,
        ExperimentKind::malliavin, ExperimentKind::spanning, ExperimentKind::validate})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown experiment: " + s);
}

void ExperimentConfig::validate() const {
  solver.validate();
  if (nstar < 1 || nstar > solver.kmax)
    throw ConfigError("config: nstar must satisfy 1 <= nstar <= kmax");
  if (amplitude < 0.0) throw ConfigError("config: amplitude must be >= 0");
  if (horizon <= 0.0) throw ConfigError("config: horizon must be > 0");
  if (ensemble < 1) throw ConfigError("config: ensemble must be >= 1");
  if (checkpoint_every <= 0.0) throw ConfigError("config: checkpoint_every must be > 0");
  if (burnin < 0.0) throw ConfigError("config: burnin must be >= 0");
  if (renorm_interval <= 0.0) throw ConfigError("config: renorm_interval must be > 0");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (experiment == ExperimentKind::malliavin) {
    if (!(0.0 < tau0 && tau0 < T0 && T0 < 1.0))
      throw ConfigError("config: malliavin runs need 0 < tau0 < T0 < 1");
  }
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

std::string ExperimentConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["nu"] = fmt_double(solver.nu);
  kv["dt"] = fmt_double(solver.dt);
  kv["kmax"] = std::to_string(solver.kmax);
  kv["gridsize"] = std::to_string(solver.gridsize);
  kv["dealias"] = fmt_double(solver.dealias);
  kv["nonlinear"] = solver.enable_nonlinear ? "1" : "0";
  kv["flow_substeps"] = std::to_string(solver.flow_substeps);
  kv["nstar"] = std::to_string(nstar);
  kv["alpha"] = fmt_double(alpha);
  kv["amplitude"] = fmt_double(amplitude);
  kv["experiment"] = to_string(experiment);
  kv["horizon"] = fmt_double(horizon);
  kv["ensemble"] = std::to_string(ensemble);
  kv["seed"] = std::to_string(seed);
  kv["tau0"] = fmt_double(tau0);
  kv["T0"] = fmt_double(T0);
  kv["out"] = out_dir;
  kv["checkpoint_every"] = fmt_double(checkpoint_every);
  kv["burnin"] = fmt_double(burnin);
  kv["renorm_interval"] = fmt_double(renorm_interval);
  kv["monitor_sigma"] = fmt_double(monitor_sigma);
  kv["monitor_alpha"] = fmt_double(monitor_alpha);
  kv["monitor_eta"] = fmt_double(monitor_eta);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

uint64_t ExperimentConfig::config_hash() const {
  // FNV-1a over the canonical text
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  auto as_d = [&] { return std::stod(value); };
  auto as_i = [&] { return std::stoi(value); };
  if (key == "nu") cfg.solver.nu = as_d();
  else if (key == "dt") cfg.solver.dt = as_d();
  else if (key == "kmax") cfg.solver.kmax = as_i();
  else if (key == "gridsize") cfg.solver.gridsize = as_i();
  else if (key == "dealias") cfg.solver.dealias = as_d();
  else if (key == "nonlinear") cfg.solver.enable_nonlinear = as_i() != 0;
  else if (key == "flow_substeps") cfg.solver.flow_substeps = as_i();
  else if (key == "nstar") cfg.nstar = as_i();
  else if (key == "alpha") cfg.alpha = as_d();
  else if (key == "amplitude") cfg.amplitude = as_d();
  else if (key == "experiment") cfg.experiment = experiment_from_string(value);
  else if (key == "horizon") cfg.horizon = as_d();
  else if (key == "ensemble") cfg.ensemble = as_i();
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "tau0") cfg.tau0 = as_d();
  else if (key == "T0") cfg.T0 = as_d();
  else if (key == "out") cfg.out_dir = value;
  else if (key == "checkpoint_every") cfg.checkpoint_every = as_d();
  else if (key == "burnin") cfg.burnin = as_d();
  else if (key == "renorm_interval") cfg.renorm_interval = as_d();
  else if (key == "threads") cfg.threads = as_i();
  else if (key == "monitor_sigma") cfg.monitor_sigma = as_d();
  else if (key == "monitor_alpha") cfg.monitor_alpha = as_d();
  else if (key == "monitor_eta") cfg.monitor_eta = as_d();
  else throw ConfigError("unknown config key: " + key);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

int effective_threads(const ExperimentConfig& cfg) {
  int t = cfg.threads >= 1 ? cfg.threads : 1;
  if (const char* cap = std::getenv("LCL_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1) t = std::min(t, c);
  }
  return std::max(1, t);
}

void parallel_for_ordered(int n, int nthreads, const std::function<void(int)>& fn) {
  nthreads = std::max(1, std::min(nthreads, n));
  if (nthreads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  pool.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace lcl
