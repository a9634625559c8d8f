#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcl/brackets.hpp"
#include "lcl/lyapunov.hpp"
#include "lcl/malliavin.hpp"

namespace lcl {

enum class ExperimentKind { simulate, lyapunov, spectrum, malliavin, spanning, validate };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Experiment configuration: solver + forcing + orchestration knobs.
/// File format is flat `key = value` text; CLI flags override file values.
struct ExperimentConfig {
  SolverConfig solver;

  // forcing profile
  int nstar = 4;
  double alpha = 5.5;
  double amplitude = 0.5;

  ExperimentKind experiment = ExperimentKind::lyapunov;
  double horizon = 2000.0;
  int ensemble = 16;
  uint64_t seed = 1;
  double tau0 = 0.1;
  double T0 = 0.5;
  std::string out_dir = "out";
  double checkpoint_every = 10.0;

  // additional documented knobs
  double burnin = 10.0;
  double renorm_interval = 1.0;
  int threads = 1;          // capped by LCL_THREADS when set
  double monitor_sigma = 1e-2;
  double monitor_alpha = 1.0;
  double monitor_eta = 1e-3;

  void validate() const;
  ForcingSpec forcing() const { return ForcingSpec(nstar, alpha, amplitude); }

  /// Canonical text: sorted key=value lines; basis of the config hash.
  std::string canonical_text() const;
  uint64_t config_hash() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Worker count after applying the LCL_THREADS cap.
int effective_threads(const ExperimentConfig& cfg);

/// Run fn(0..n-1) on up to nthreads workers; items are independent and
/// results are collected by index, so the outcome is schedule-invariant.
void parallel_for_ordered(int n, int nthreads, const std::function<void(int)>& fn);

/// Super-Lyapunov functional V(u) = sigma (||u||_{H1}^2 + alpha ||u||_{H5}^{1/3}).
double super_lyapunov_V(const SpectralVelocity& u, double sigma, double alpha_v);

/// Windowed moment monitor: running suprema of ||grad u||^2 and V(u),
/// empirical exponential-moment averages, and a growth flag that trips
/// when three consecutive windows each exceed the previous by 50%.
struct MomentWindow {
  double t_end = 0.0;
  double sup_grad_sq = 0.0;
  double sup_v = 0.0;
};

class MomentMonitor {
 public:
  MomentMonitor(double window, double eta, double sigma, double alpha_v);
  void observe(double t, const SpectralVelocity& u);
  const std::vector<MomentWindow>& windows() const { return windows_; }
  bool growth_flag() const { return flagged_; }
  double exp_moment_grad() const;
  double exp_moment_v() const;

  /// Flat state for checkpointing; restore() inverts serialize().
  std::vector<double> serialize() const;
  void restore(const std::vector<double>& state);

 private:
  void close_window(double t);
  double window_, eta_, sigma_, alpha_v_;
  double cur_sup_grad_ = 0.0, cur_sup_v_ = 0.0;
  double window_start_ = 0.0;
  bool any_ = false;
  bool flagged_ = false;
  std::vector<MomentWindow> windows_;
};

/// Bit-exact snapshot of a coupled trajectory plus estimator partial sums.
struct SimCheckpoint {
  SnsState state;
  ParticleState particle;
  TangentMatrix tangent;
  uint64_t rng_seed = 0, rng_stream = 0, rng_counter = 0;
  std::vector<double> accumulators;
};

/// Binary layout: magic "LCL1", format version u32, dimensions, then
/// little-endian 64-bit fields in documented order.  Round trips are
/// byte-identical by contract.
void checkpoint_save(const SimCheckpoint& c, const std::string& path);
SimCheckpoint checkpoint_load(const std::string& path);

struct RunRecord {
  uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  std::string provenance;
  int exit_code = 0;
};

/// Dispatch an experiment: writes CSV tables and summary.json under
/// cfg.out_dir; deterministic given (config, seed) apart from the timing
/// fields in summary.json.
RunRecord run_experiment(const ExperimentConfig& cfg);

/// Single-trajectory run with time series, moment monitoring, and
/// periodic checkpoints; resumes bit-exactly from a saved checkpoint.
RunRecord run_simulate(const ExperimentConfig& cfg,
                       const std::optional<std::string>& resume);

/// Number of solver steps in the recorded [0, T0] window.
int rec_steps(const ExperimentConfig& cfg);

/// The quick analytic-oracle suite behind the `validate` subcommand.
struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<ValidationCheck> run_validation_suite();

}  // namespace lcl
