#include <cmath>

#include "lcl/lab.hpp"

namespace lcl {

double super_lyapunov_V(const SpectralVelocity& u, double sigma, double alpha_v) {
  if (sigma <= 0.0 || alpha_v <= 0.0)
    throw ConfigError("super_lyapunov_V: sigma and alpha must be > 0");
  const double h1 = sobolev_norm(u, 1);
  const double h5 = sobolev_norm(u, 5);
  return sigma * (h1 * h1 + alpha_v * std::cbrt(h5));
}

MomentMonitor::MomentMonitor(double window, double eta, double sigma, double alpha_v)
    : window_(window), eta_(eta), sigma_(sigma), alpha_v_(alpha_v) {
  if (window <= 0.0) throw ConfigError("MomentMonitor: window must be > 0");
}

void MomentMonitor::observe(double t, const SpectralVelocity& u) {
  if (!any_) {
    window_start_ = t;
    any_ = true;
  }
  // the enstrophy proxy is the grad-norm square of this representation
  cur_sup_grad_ = std::max(cur_sup_grad_, enstrophy(u));
  cur_sup_v_ = std::max(cur_sup_v_, super_lyapunov_V(u, sigma_, alpha_v_));
  if (t - window_start_ >= window_ - 1e-12) close_window(t);
}

void MomentMonitor::close_window(double t) {
  windows_.push_back({t, cur_sup_grad_, cur_sup_v_});
  cur_sup_grad_ = 0.0;
  cur_sup_v_ = 0.0;
  window_start_ = t;
  const size_t n = windows_.size();
  if (n >= 4) {
    bool growing = true;
    for (size_t i = n - 3; i < n; ++i)
      growing = growing && windows_[i].sup_grad_sq > 1.5 * windows_[i - 1].sup_grad_sq;
    if (growing) flagged_ = true;  // flag only, never aborts
  }
}

double MomentMonitor::exp_moment_grad() const {
  if (windows_.empty()) return 1.0;
  double s = 0.0;
  for (const auto& w : windows_) s += std::exp(eta_ * w.sup_grad_sq);
  return s / double(windows_.size());
}

double MomentMonitor::exp_moment_v() const {
  if (windows_.empty()) return 1.0;
  double s = 0.0;
  for (const auto& w : windows_) s += std::exp(w.sup_v);
  return s / double(windows_.size());
}

std::vector<double> MomentMonitor::serialize() const {
  std::vector<double> s;
  s.push_back(cur_sup_grad_);
  s.push_back(cur_sup_v_);
  s.push_back(window_start_);
  s.push_back(any_ ? 1.0 : 0.0);
  s.push_back(flagged_ ? 1.0 : 0.0);
  s.push_back(double(windows_.size()));
  for (const auto& w : windows_) {
    s.push_back(w.t_end);
    s.push_back(w.sup_grad_sq);
    s.push_back(w.sup_v);
  }
  return s;
}

void MomentMonitor::restore(const std::vector<double>& s) {
  if (s.size() < 6) throw ConfigError("MomentMonitor::restore: truncated state");
  cur_sup_grad_ = s[0];
  cur_sup_v_ = s[1];
  window_start_ = s[2];
  any_ = s[3] != 0.0;
  flagged_ = s[4] != 0.0;
  const size_t n = size_t(s[5]);
  if (s.size() != 6 + 3 * n) throw ConfigError("MomentMonitor::restore: bad state length");
  windows_.clear();
  for (size_t i = 0; i < n; ++i)
    windows_.push_back({s[6 + 3 * i], s[7 + 3 * i], s[8 + 3 * i]});
}

}  // namespace lcl
