#pragma once

#include <cmath>
#include <numbers>

namespace trk {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// pT [GeV] = kCurvatureGevPerTeslaMm * |Bz| [T] * R [mm]
inline constexpr double kCurvatureGevPerTeslaMm = 0.3e-3;

/// Wrap an angle into (-pi, pi].
inline double wrap_pm_pi(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double hypot_xy(double x, double y) { return std::sqrt(x * x + y * y); }

/// Azimuth of a point in the xy plane, in (-pi, pi].
inline double azimuth(double x, double y) { return std::atan2(y, x); }

/// Squared elliptical distance of (phi, t) from a window center, with the
/// window half-extents as unit axes. Values <= 1 are inside the window.
/// Shared by the grid-based finder and the linear-scan reference so both
/// rank hits on identical arithmetic.
inline double window_distance_sq(double dphi, double dt, double half_phi,
                                 double half_t) {
  const double a = dphi / half_phi;
  const double b = dt / half_t;
  return a * a + b * b;
}

}  // namespace trk
