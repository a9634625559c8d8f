#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lcl {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised when a configuration violates a structural precondition
/// (resolution, truncation, time-step bounds, file-format mismatches).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a trajectory produces non-finite or runaway coefficients.
/// Carries the simulation time and the offending magnitude for diagnosis.
struct BlowupError : std::runtime_error {
  double t;
  double magnitude;
  BlowupError(double t_, double mag, const std::string& what)
      : std::runtime_error(what), t(t_), magnitude(mag) {}
};

/// Raised when the partial Malliavin matrix is too close to singular for
/// the control construction to proceed.
struct NonDegeneracyError : std::runtime_error {
  double lambda_min;
  NonDegeneracyError(double lmin, const std::string& what)
      : std::runtime_error(what), lambda_min(lmin) {}
};

/// Wrap a coordinate to [0, 2pi).
double wrap_angle(double a);

/// Wrap both components of a torus point to [0, 2pi).
Vec2 wrap_torus(const Vec2& x);

}  // namespace lcl
