#pragma once

#include <optional>

#include "trk/geometry.hpp"
#include "trk/math.hpp"

namespace trk {

/// Physical trajectory state: position in mm, momentum in GeV, charge +-1.
struct TrajectoryState {
  double x = 0.0, y = 0.0, z = 0.0;
  double px = 0.0, py = 0.0, pz = 0.0;
  int q = 1;
};

/// Local trajectory through three hits taken in traversal order: a circle
/// through all three xy projections, z linear in turning angle and exact at
/// the last two hits. Collinear triplets degrade to a straight line
/// parameterized by transverse path length.
struct ThreeHitHelix {
  bool is_line = false;
  double bz = 0.0;  // Tesla, field used for the fit

  // circle mode
  double cx = 0.0, cy = 0.0;  // center, mm
  double radius = 0.0;        // mm
  int rot = 1;                // +1 counter-clockwise, -1 clockwise
  double ref_azimuth = 0.0;   // azimuth of hit2 about the center
  double ref_z = 0.0;         // z of hit2
  double dz_darc = 0.0;       // mm per rad of turning angle
  double arc_back = 0.0;      // turning angle of hit1 relative to hit2, <= 0
  double arc_front = 0.0;     // turning angle of hit3 relative to hit2, >= 0

  // line mode: point at hit2, unit xy direction towards hit3
  double px_ = 0.0, py_ = 0.0, pz_ = 0.0;
  double ux = 0.0, uy = 0.0;
  double dz_ds = 0.0;  // mm of z per mm of transverse path
  // arc_back / arc_front hold signed transverse distances in line mode

  /// 3D point at turning angle (circle) or transverse path (line) relative
  /// to hit2.
  Vec3 at(double arc) const;
};

/// Curvature below which fit_three_hits switches to the straight-line
/// representation (1/mm).
inline constexpr double kLineCurvatureLimit = 1e-7;

enum class Direction { inward, outward };

enum class CrossingKind { interior, near_edge };

/// A trajectory-surface crossing in surface coordinates. arc orders
/// crossings along the trajectory relative to the fit's hit2.
struct Crossing {
  SurfacePoint point;
  CrossingKind kind = CrossingKind::interior;
  double arc = 0.0;
};

/// Intersection of the ray from `from` through `through` with the surface,
/// in surface coordinates. Empty when no forward intersection lies within
/// the surface bounds.
std::optional<SurfacePoint> line_project(const Vec3& from, const Vec3& through,
                                         const LayerSurface& surface);

/// Same ray intersection against the unbounded surface (infinite cylinder
/// or full plane). Seeding projections use this: a beamspot-displaced
/// estimate may land beyond the physical bounds while the true hit is well
/// inside the search window.
std::optional<SurfacePoint> line_project_unbounded(const Vec3& from,
                                                   const Vec3& through,
                                                   const LayerSurface& surface);

/// Circumcircle through the xy projections of three trajectory-ordered
/// points; z linear in turning angle through h2 and h3. Throws
/// ValidationError when two points coincide in xy.
ThreeHitHelix fit_three_hits(const Vec3& h1, const Vec3& h2, const Vec3& h3,
                             double bz);

/// |z of the helix at the point's azimuth - z of the point|.
double z_residual(const ThreeHitHelix& helix, const Vec3& point);

/// First crossing of the helix with the surface beyond its front (outward)
/// or behind its back (inward). near_edge marks crossings within
/// edge_margin_mm of the surface bounds.
std::optional<Crossing> extrapolate(const ThreeHitHelix& helix,
                                    const LayerSurface& surface,
                                    Direction direction,
                                    double edge_margin_mm = 10.0);

struct HelixMomentum {
  double pt = 0.0;  // GeV; +infinity for the straight-line limit
  TrajectoryState state;  // at hit3
};

/// pT from the Lorentz relation pT = 0.3 |Bz| R (R in m) and the full state
/// at the leading hit. Straight-line helices report pt = +infinity with a
/// unit-pT direction.
HelixMomentum momentum_from_helix(const ThreeHitHelix& helix, double bz);

}  // namespace trk
