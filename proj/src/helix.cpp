#include "trk/helix.hpp"

#include <cmath>
#include <limits>

namespace trk {

namespace {

constexpr double kArcEps = 1e-9;     // smallest arc step considered forward
constexpr double kCoincident = 1e-9;  // mm, xy coincidence threshold

struct BoundsCheck {
  bool inside = false;
  CrossingKind kind = CrossingKind::interior;
};

BoundsCheck classify(double value, double lo, double hi, double margin) {
  BoundsCheck b;
  if (value < lo || value > hi) return b;
  b.inside = true;
  b.kind = (value - lo < margin || hi - value < margin)
               ? CrossingKind::near_edge
               : CrossingKind::interior;
  return b;
}

}  // namespace

Vec3 ThreeHitHelix::at(double arc) const {
  if (is_line) {
    return {px_ + arc * ux, py_ + arc * uy, pz_ + arc * dz_ds};
  }
  const double a = ref_azimuth + rot * arc;
  return {cx + radius * std::cos(a), cy + radius * std::sin(a),
          ref_z + arc * dz_darc};
}

std::optional<SurfacePoint> line_project_unbounded(const Vec3& from,
                                                   const Vec3& through,
                                                   const LayerSurface& surface) {
  const double dx = through.x - from.x;
  const double dy = through.y - from.y;
  const double dz = through.z - from.z;

  if (surface.is_cylinder()) {
    const auto& c = surface.cylinder();
    // |from_xy + u * d_xy|^2 = radius^2
    const double a = dx * dx + dy * dy;
    const double b = from.x * dx + from.y * dy;
    const double q = from.x * from.x + from.y * from.y - c.radius * c.radius;
    if (a <= 0.0) return std::nullopt;  // ray parallel to the axis
    const double disc = b * b - a * q;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    double u = (-b - root) / a;
    if (u <= kArcEps) u = (-b + root) / a;
    if (u <= kArcEps) return std::nullopt;
    const double x = from.x + u * dx;
    const double y = from.y + u * dy;
    const double z = from.z + u * dz;
    return SurfacePoint{azimuth(x, y), z};
  }

  const auto& d = surface.disk();
  if (dz == 0.0) return std::nullopt;
  const double u = (d.z - from.z) / dz;
  if (u <= kArcEps) return std::nullopt;
  const double x = from.x + u * dx;
  const double y = from.y + u * dy;
  return SurfacePoint{azimuth(x, y), hypot_xy(x, y)};
}

std::optional<SurfacePoint> line_project(const Vec3& from, const Vec3& through,
                                         const LayerSurface& surface) {
  const auto p = line_project_unbounded(from, through, surface);
  if (!p) return std::nullopt;
  if (p->t < surface.t_min() || p->t > surface.t_max()) return std::nullopt;
  return p;
}

ThreeHitHelix fit_three_hits(const Vec3& h1, const Vec3& h2, const Vec3& h3,
                             double bz) {
  const double ax = h1.x - h2.x, ay = h1.y - h2.y;
  const double cx_ = h3.x - h2.x, cy_ = h3.y - h2.y;
  const double bx = h3.x - h1.x, by = h3.y - h1.y;

  const double la = hypot_xy(ax, ay);
  const double lb = hypot_xy(bx, by);
  const double lc = hypot_xy(cx_, cy_);
  if (la < kCoincident || lc < kCoincident || lb < kCoincident) {
    throw ValidationError("fit_three_hits: coincident xy points");
  }

  // cross = (h1-h2) x (h3-h2); Menger curvature 2|cross| / (la lb lc)
  const double cross = ax * cy_ - ay * cx_;
  const double curvature = 2.0 * std::abs(cross) / (la * lb * lc);

  ThreeHitHelix h;
  h.bz = bz;

  if (curvature < kLineCurvatureLimit) {
    h.is_line = true;
    const double inv = 1.0 / lc;
    h.ux = cx_ * inv;
    h.uy = cy_ * inv;
    h.px_ = h2.x;
    h.py_ = h2.y;
    h.pz_ = h2.z;
    h.arc_front = lc;
    h.dz_ds = (h3.z - h2.z) / lc;
    // signed transverse distance of h1 along the direction
    h.arc_back = ax * h.ux + ay * h.uy;
    return h;
  }

  // circumcenter relative to h2: solve 2 u.a = |a|^2, 2 u.c = |c|^2
  const double ra = 0.5 * (ax * ax + ay * ay);
  const double rc = 0.5 * (cx_ * cx_ + cy_ * cy_);
  const double inv_det = 1.0 / cross;
  const double ucx = (ra * cy_ - ay * rc) * inv_det;
  const double ucy = (ax * rc - ra * cx_) * inv_det;

  h.cx = h2.x + ucx;
  h.cy = h2.y + ucy;
  h.radius = hypot_xy(ucx, ucy);
  // rotation sense of h1 -> h2 -> h3: sign of (h2-h1) x (h3-h2) = -cross
  h.rot = cross < 0.0 ? 1 : -1;

  const double a1 = azimuth(h1.x - h.cx, h1.y - h.cy);
  h.ref_azimuth = azimuth(h2.x - h.cx, h2.y - h.cy);
  const double a3 = azimuth(h3.x - h.cx, h3.y - h.cy);

  // nearest-branch arcs: consecutive trajectory hits are always less than
  // half a turn apart, and z_residual evaluates on the same branch
  h.ref_z = h2.z;
  h.arc_front = wrap_pm_pi(h.rot * (a3 - h.ref_azimuth));
  h.arc_back = wrap_pm_pi(h.rot * (a1 - h.ref_azimuth));
  h.dz_darc = (h3.z - h2.z) / h.arc_front;
  return h;
}

double z_residual(const ThreeHitHelix& helix, const Vec3& point) {
  if (helix.is_line) {
    const double s =
        (point.x - helix.px_) * helix.ux + (point.y - helix.py_) * helix.uy;
    return std::abs(helix.pz_ + s * helix.dz_ds - point.z);
  }
  const double a = azimuth(point.x - helix.cx, point.y - helix.cy);
  const double arc = wrap_pm_pi(helix.rot * (a - helix.ref_azimuth));
  return std::abs(helix.ref_z + arc * helix.dz_darc - point.z);
}

namespace {

// Smallest candidate arc beyond the helix front (outward) or largest behind
// its back (inward); nullopt when no branch qualifies.
std::optional<double> directed_arc(const ThreeHitHelix& h, double base_arc,
                                   Direction dir) {
  if (dir == Direction::outward) {
    double arc = base_arc;
    while (arc <= h.arc_front + kArcEps) arc += kTwoPi;
    return arc;
  }
  double arc = base_arc;
  while (arc >= h.arc_back - kArcEps) arc -= kTwoPi;
  return arc;
}

std::optional<Crossing> extrapolate_circle(const ThreeHitHelix& h,
                                           const LayerSurface& surface,
                                           Direction dir, double margin) {
  if (surface.is_cylinder()) {
    const auto& c = surface.cylinder();
    const double d = hypot_xy(h.cx, h.cy);
    if (d <= 0.0) return std::nullopt;
    const double cos_a =
        (d * d + c.radius * c.radius - h.radius * h.radius) /
        (2.0 * d * c.radius);
    if (cos_a < -1.0 || cos_a > 1.0) return std::nullopt;
    const double half = std::acos(cos_a);
    const double phi_center = azimuth(h.cx, h.cy);

    bool found = false;
    double best_arc = 0.0;
    double best_phi = 0.0;
    for (double phi : {phi_center + half, phi_center - half}) {
      const double x = c.radius * std::cos(phi);
      const double y = c.radius * std::sin(phi);
      const double a = azimuth(x - h.cx, y - h.cy);
      const double base = wrap_pm_pi(h.rot * (a - h.ref_azimuth));
      const auto arc = directed_arc(h, base, dir);
      if (!arc) continue;
      const bool better = dir == Direction::outward ? (*arc < best_arc)
                                                    : (*arc > best_arc);
      if (!found || better) {
        found = true;
        best_arc = *arc;
        best_phi = phi;
      }
    }
    if (!found) return std::nullopt;
    const double z = h.ref_z + best_arc * h.dz_darc;
    const auto b = classify(z, c.z_min, c.z_max, margin);
    if (!b.inside) return std::nullopt;
    return Crossing{{wrap_pm_pi(best_phi), z}, b.kind, best_arc};
  }

  const auto& dsk = surface.disk();
  if (h.dz_darc == 0.0) return std::nullopt;
  const double arc = (dsk.z - h.ref_z) / h.dz_darc;
  if (dir == Direction::outward ? (arc <= h.arc_front + kArcEps)
                                : (arc >= h.arc_back - kArcEps)) {
    return std::nullopt;
  }
  const Vec3 p = h.at(arc);
  const double r = hypot_xy(p.x, p.y);
  const auto b = classify(r, dsk.r_min, dsk.r_max, margin);
  if (!b.inside) return std::nullopt;
  return Crossing{{azimuth(p.x, p.y), r}, b.kind, arc};
}

std::optional<Crossing> extrapolate_line(const ThreeHitHelix& h,
                                         const LayerSurface& surface,
                                         Direction dir, double margin) {
  if (surface.is_cylinder()) {
    const auto& c = surface.cylinder();
    // |p2_xy + s u|^2 = radius^2 with |u| = 1
    const double b = h.px_ * h.ux + h.py_ * h.uy;
    const double q = h.px_ * h.px_ + h.py_ * h.py_ - c.radius * c.radius;
    const double disc = b * b - q;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);

    bool found = false;
    double best_s = 0.0;
    for (double s : {-b - root, -b + root}) {
      const bool ok = dir == Direction::outward ? s > h.arc_front + kArcEps
                                                : s < h.arc_back - kArcEps;
      if (!ok) continue;
      const bool better =
          dir == Direction::outward ? (s < best_s) : (s > best_s);
      if (!found || better) {
        found = true;
        best_s = s;
      }
    }
    if (!found) return std::nullopt;
    const Vec3 p = h.at(best_s);
    const auto bc = classify(p.z, c.z_min, c.z_max, margin);
    if (!bc.inside) return std::nullopt;
    return Crossing{{azimuth(p.x, p.y), p.z}, bc.kind, best_s};
  }

  const auto& dsk = surface.disk();
  if (h.dz_ds == 0.0) return std::nullopt;
  const double s = (dsk.z - h.pz_) / h.dz_ds;
  if (dir == Direction::outward ? (s <= h.arc_front + kArcEps)
                                : (s >= h.arc_back - kArcEps)) {
    return std::nullopt;
  }
  const Vec3 p = h.at(s);
  const double r = hypot_xy(p.x, p.y);
  const auto b = classify(r, dsk.r_min, dsk.r_max, margin);
  if (!b.inside) return std::nullopt;
  return Crossing{{azimuth(p.x, p.y), r}, b.kind, s};
}

}  // namespace

std::optional<Crossing> extrapolate(const ThreeHitHelix& helix,
                                    const LayerSurface& surface,
                                    Direction direction,
                                    double edge_margin_mm) {
  return helix.is_line
             ? extrapolate_line(helix, surface, direction, edge_margin_mm)
             : extrapolate_circle(helix, surface, direction, edge_margin_mm);
}

HelixMomentum momentum_from_helix(const ThreeHitHelix& helix, double bz) {
  HelixMomentum m;
  if (helix.is_line) {
    m.pt = std::numeric_limits<double>::infinity();
    const Vec3 p = helix.at(helix.arc_front);
    m.state = {p.x, p.y, p.z, helix.ux, helix.uy, helix.dz_ds, 1};
    return m;
  }
  m.pt = kCurvatureGevPerTeslaMm * std::abs(bz) * helix.radius;
  const double a3 = helix.ref_azimuth + helix.rot * helix.arc_front;
  const double tx = helix.rot > 0 ? -std::sin(a3) : std::sin(a3);
  const double ty = helix.rot > 0 ? std::cos(a3) : -std::cos(a3);
  const Vec3 p = helix.at(helix.arc_front);
  m.state.x = p.x;
  m.state.y = p.y;
  m.state.z = p.z;
  m.state.px = m.pt * tx;
  m.state.py = m.pt * ty;
  m.state.pz = m.pt * (helix.dz_darc / helix.radius);
  m.state.q = (bz < 0.0 ? helix.rot : -helix.rot) > 0 ? 1 : -1;
  return m;
}

}  // namespace trk
