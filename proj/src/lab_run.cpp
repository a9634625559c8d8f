#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lcl/lab.hpp"

namespace lcl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Line-buffered CSV with fixed number formatting so identical configs
/// reproduce identical bytes.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path.string());
    out_ << header << "\n";
  }
  CsvWriter& num(double v) {
    sep();
    out_ << fmt(v);
    return *this;
  }
  CsvWriter& integer(long v) {
    sep();
    out_ << v;
    return *this;
  }
  void endrow() {
    out_ << "\n";
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

LagrangianStepper make_stepper(const ExperimentConfig& cfg, uint64_t stream_id) {
  NoiseStream rng(cfg.seed, stream_id);
  const Vec2 x0(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
  const double ang = kTwoPi * rng.uniform();
  const Vec2 v0(std::cos(ang), std::sin(ang));
  return LagrangianStepper(cfg.solver, cfg.forcing(), rng, x0, v0);
}

json estimate_json(const ExponentEstimate& e) {
  return json{{"value", e.value},
              {"stderr", e.stderr_},
              {"horizon", e.horizon},
              {"batches", e.batches}};
}

struct Pooled {
  double mean = 0.0, stderr_ = 0.0;
};

Pooled pool(const std::vector<double>& xs) {
  Pooled p;
  const int n = int(xs.size());
  if (n == 0) return p;
  for (double x : xs) p.mean += x;
  p.mean /= n;
  if (n > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - p.mean) * (x - p.mean);
    p.stderr_ = std::sqrt(var / (n - 1) / n);
  }
  return p;
}

// ---------------------------------------------------------------------
// lyapunov / spectrum

json run_exponents(const ExperimentConfig& cfg) {
  std::vector<ExponentBundle> bundles(cfg.ensemble);
  parallel_for_ordered(cfg.ensemble, effective_threads(cfg), [&](int i) {
    LagrangianStepper s = make_stepper(cfg, uint64_t(i) + 1);
    s.burn_in(cfg.burnin);
    LagrangianCocycleDriver driver(s);
    bundles[i] = estimate_exponents(driver, cfg.horizon, cfg.renorm_interval);
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "exponents.csv",
                "trajectory,lambda1 (1/time),lambda2 (1/time),stderr1 (1/time),"
                "stderr2 (1/time),horizon (time)");
  std::vector<double> l1, l2, lnorm, lproj;
  for (int i = 0; i < cfg.ensemble; ++i) {
    const ExponentBundle& b = bundles[i];
    csv.integer(i).num(b.qr_lambda1.value).num(b.qr_lambda2.value)
        .num(b.qr_lambda1.stderr_).num(b.qr_lambda2.stderr_)
        .num(b.qr_lambda1.horizon);
    csv.endrow();
    l1.push_back(b.qr_lambda1.value);
    l2.push_back(b.qr_lambda2.value);
    lnorm.push_back(b.norm_top.value);
    lproj.push_back(b.projective.value);
  }

  const Pooled p1 = pool(l1), p2 = pool(l2), pn = pool(lnorm), pp = pool(lproj);
  std::vector<double> lsum(l1.size());
  for (size_t i = 0; i < l1.size(); ++i) lsum[i] = l1[i] + l2[i];
  const Pooled ps = pool(lsum);

  json out;
  out["per_trajectory"] = json::array();
  for (const auto& b : bundles)
    out["per_trajectory"].push_back(json{{"norm_top", estimate_json(b.norm_top)},
                                         {"qr_lambda1", estimate_json(b.qr_lambda1)},
                                         {"qr_lambda2", estimate_json(b.qr_lambda2)},
                                         {"projective", estimate_json(b.projective)}});
  out["pooled"] = json{
      {"lambda1", {{"mean", p1.mean}, {"stderr", p1.stderr_}}},
      {"lambda2", {{"mean", p2.mean}, {"stderr", p2.stderr_}}},
      {"lambda1_norm", {{"mean", pn.mean}, {"stderr", pn.stderr_}}},
      {"lambda1_projective", {{"mean", pp.mean}, {"stderr", pp.stderr_}}},
      {"lambda_sum", {{"mean", ps.mean}, {"stderr", ps.stderr_}}}};
  out["ci95_lambda1"] = json::array(
      {p1.mean - 1.959963984540054 * p1.stderr_, p1.mean + 1.959963984540054 * p1.stderr_});
  return out;
}

// ---------------------------------------------------------------------
// malliavin

json run_malliavin(const ExperimentConfig& cfg) {
  struct Row {
    double lambda_min = 0.0, cond = 0.0, rho_low = 0.0, rho_high = 0.0, cost = 0.0;
    bool degenerate = false;
  };
  std::vector<Row> rows(cfg.ensemble);

  parallel_for_ordered(cfg.ensemble, effective_threads(cfg), [&](int i) {
    LagrangianStepper s = make_stepper(cfg, uint64_t(i) + 1);
    s.burn_in(cfg.burnin);
    TrajectoryRecord rec = record_trajectory(s, rec_steps(cfg));
    LowModeOps ops(cfg.forcing(), cfg.solver.nu);
    MalliavinPipeline pipe(rec, s.solver(), ops, cfg.tau0, cfg.T0, true);
    Row& r = rows[i];
    r.lambda_min = pipe.N().lambda_min;
    r.cond = pipe.N().cond;
    try {
      FullTangent h = random_unit_tangent(cfg.solver.kmax, rec.v.back(), s.rng());
      ResidualReport rep = pipe.residual(h);
      r.rho_low = rep.rho_low;
      r.rho_high = rep.rho_high;
      r.cost = rep.cost_l2;
    } catch (const NonDegeneracyError&) {
      r.degenerate = true;
      r.rho_low = r.rho_high = r.cost = std::nan("");
    }
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "malliavin.csv",
                "run,lambda_min (proxy^2 time),cond_N (1),rho_low (proxy),"
                "rho_high (proxy),cost_l2 (proxy^2 time)");
  std::vector<double> lmins;
  int positive = 0;
  for (int i = 0; i < cfg.ensemble; ++i) {
    const Row& r = rows[i];
    csv.integer(i).num(r.lambda_min).num(r.cond).num(r.rho_low).num(r.rho_high).num(r.cost);
    csv.endrow();
    lmins.push_back(r.lambda_min);
    if (r.lambda_min > 0.0) ++positive;
  }

  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  json ccdf = json::array();
  for (const CcdfRow& row : min_eig_tail(lmins, eps))
    ccdf.push_back(json{{"epsilon", row.epsilon}, {"fraction", row.fraction}});

  json out;
  out["positive_fraction"] = double(positive) / cfg.ensemble;
  out["ccdf_lambda_min"] = ccdf;
  return out;
}

// ---------------------------------------------------------------------
// spanning

json run_spanning(const ExperimentConfig& cfg) {
  const std::vector<WaveVector> kset = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  NoiseStream rng(cfg.seed, 0);
  CsvWriter csv(fs::path(cfg.out_dir) / "spanning.csv",
                "x1 (rad),x2 (rad),v_angle (rad),rank (1)");
  int full = 0;
  const int samples = cfg.ensemble;
  for (int i = 0; i < samples; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double ang = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(ang), std::sin(ang));
    const int rank = spanning_rank(x, v, kset);
    if (rank == 3) ++full;
    csv.num(x[0]).num(x[1]).num(ang).integer(rank);
    csv.endrow();
  }

  // bracket lower-bound certificate at the statistically steady state
  LagrangianStepper s = make_stepper(cfg, 1);
  s.burn_in(cfg.burnin);
  const LowerBoundReport rep =
      lower_bound_check(s.state().u, cfg.forcing(), s.particle().x, s.particle().v,
                        cfg.solver.nu, 1000, cfg.seed + 17);

  json out;
  out["full_rank_fraction"] = double(full) / samples;
  out["lower_bound"] = json{{"min_pairing", rep.min_pairing},
                            {"mean_pairing", rep.mean_pairing},
                            {"samples", rep.samples},
                            {"strictly_positive", rep.strictly_positive}};
  return out;
}

// ---------------------------------------------------------------------
// validate: quick analytic oracle suite; nonzero exit on any failure

json run_validate(const ExperimentConfig&, int& exit_code) {
  std::vector<ValidationCheck> results = run_validation_suite();
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s: %s\n", r.pass ? "  ok  " : " FAIL ", r.name.c_str(),
                r.detail.c_str());
    arr.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  exit_code = all ? 0 : 1;
  json out;
  out["checks"] = arr;
  out["all_pass"] = all;
  return out;
}

}  // namespace

int rec_steps(const ExperimentConfig& cfg) {
  return int(std::lround(cfg.T0 / cfg.solver.dt));
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const auto t_begin = std::chrono::steady_clock::now();

  if (cfg.experiment == ExperimentKind::simulate) return run_simulate(cfg, std::nullopt);

  RunRecord rec;
  rec.config_hash = cfg.config_hash();
  rec.provenance = "lcl 1.0 (checkpoint format LCL1)";

  json results;
  switch (cfg.experiment) {
    case ExperimentKind::lyapunov:
    case ExperimentKind::spectrum:
      results = run_exponents(cfg);
      break;
    case ExperimentKind::malliavin:
      results = run_malliavin(cfg);
      break;
    case ExperimentKind::spanning:
      results = run_spanning(cfg);
      break;
    case ExperimentKind::validate:
      results = run_validate(cfg, rec.exit_code);
      break;
    default:
      throw ConfigError("run_experiment: unhandled experiment");
  }

  const auto t_end = std::chrono::steady_clock::now();
  rec.wall_seconds = std::chrono::duration<double>(t_end - t_begin).count();

  char hashbuf[20];
  std::snprintf(hashbuf, sizeof hashbuf, "%016llx",
                static_cast<unsigned long long>(rec.config_hash));
  json summary;
  summary["experiment"] = to_string(cfg.experiment);
  summary["config_hash"] = hashbuf;
  summary["config"] = cfg.canonical_text();
  summary["results"] = results;
  summary["provenance"] = rec.provenance;
  summary["timing"] = json{{"wall_seconds", rec.wall_seconds}};
  std::ofstream out(fs::path(cfg.out_dir) / "summary.json");
  out << summary.dump(2) << "\n";
  return rec;
}

}  // namespace lcl
