#include "trk/grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "trk/math.hpp"

namespace trk {

std::vector<GridHit> make_grid_hits(std::span<const Hit> hits,
                                    const LayerSurface& surface,
                                    const FieldMap& field,
                                    double tolerance_mm) {
  std::vector<GridHit> out;
  out.reserve(hits.size());
  for (const Hit& h : hits) {
    const SurfacePoint p = surface_coords(h, surface, tolerance_mm);
    GridHit g;
    g.phi = p.phi;
    g.t = p.t;
    g.x = h.x;
    g.y = h.y;
    g.z = h.z;
    g.hit_id = h.hit_id;
    for (int v = 0; v < 3; ++v) {
      g.bz[v] = field.at(surface.key, p.t, static_cast<FieldVariant>(v));
    }
    out.push_back(g);
  }
  return out;
}

std::vector<GridHit> retain(std::span<const GridHit> hits,
                            const std::vector<bool>& alive_mask) {
  if (alive_mask.size() != hits.size()) {
    throw ValidationError("retain: mask length does not match hit count");
  }
  std::vector<GridHit> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (alive_mask[i]) out.push_back(hits[i]);
  }
  return out;
}

LayerGrid LayerGrid::build(const LayerSurface& surface,
                           std::span<const GridHit> hits, double window_phi,
                           double window_t) {
  if (window_phi <= 0.0 || window_t <= 0.0) {
    throw ValidationError("grid window sizes must be positive");
  }
  if (window_phi > kPi) {
    throw ValidationError("grid phi window larger than pi");
  }

  LayerGrid g;
  g.window_phi_ = window_phi;
  g.window_t_ = window_t;
  g.n_phi_ = std::max(2, static_cast<int>(kTwoPi / window_phi));
  g.cell_phi_ = kTwoPi / g.n_phi_;

  g.t_min_ = surface.t_min();
  const double span_t = surface.t_max() - g.t_min_;
  g.n_t_ = std::max(1, static_cast<int>(span_t / window_t));
  g.cell_t_ = span_t / g.n_t_;

  g.n_source_hits_ = hits.size();
  g.cells_.assign(static_cast<std::size_t>(g.n_phi_ + 2) * (g.n_t_ + 2), {});

  auto interior_col = [&g](double phi) {
    return std::clamp(g.col_of(phi), 1, g.n_phi_);
  };
  auto interior_row = [&g](double t) {
    return std::clamp(g.row_of(t), 1, g.n_t_);
  };

  // count, including the overlap copies
  for (const GridHit& h : hits) {
    const int col = interior_col(h.phi);
    const int row = interior_row(h.t);
    ++g.cells_[g.cell_index(col, row)].count;
    if (col == g.n_phi_) ++g.cells_[g.cell_index(0, row)].count;
    if (col == 1) ++g.cells_[g.cell_index(g.n_phi_ + 1, row)].count;
  }

  // prefix offsets
  std::uint32_t offset = 0;
  for (Cell& c : g.cells_) {
    c.first = offset;
    offset += c.count;
    c.count = 0;
  }
  g.hits_.resize(offset);

  // scatter, deep copies; overlap copies get phi shifted by +-2pi
  auto place = [&g](std::size_t cell, const GridHit& h, double phi_shift) {
    Cell& c = g.cells_[cell];
    GridHit& dst = g.hits_[c.first + c.count++];
    dst = h;
    dst.phi += phi_shift;
  };
  for (const GridHit& h : hits) {
    const int col = interior_col(h.phi);
    const int row = interior_row(h.t);
    place(g.cell_index(col, row), h, 0.0);
    if (col == g.n_phi_) place(g.cell_index(0, row), h, -kTwoPi);
    if (col == 1) place(g.cell_index(g.n_phi_ + 1, row), h, kTwoPi);
  }
  return g;
}

int LayerGrid::col_of(double phi) const {
  return 1 + static_cast<int>(std::floor((phi + kPi) / cell_phi_));
}

int LayerGrid::row_of(double t) const {
  return 1 + static_cast<int>(std::floor((t - t_min_) / cell_t_));
}

void LayerGrid::query_window(const SurfacePoint& center, double window_phi,
                             double window_t,
                             std::vector<const GridHit*>& out) const {
  assert(window_phi <= window_phi_ + 1e-12 && window_t <= window_t_ + 1e-12);
  assert(center.phi > -kPi - 1e-12 && center.phi <= kPi + 1e-12);
  if (cells_.empty()) return;

  const double half_phi = 0.5 * window_phi;
  const double half_t = 0.5 * window_t;

  int col_lo = col_of(center.phi - half_phi);
  int col_hi = col_of(center.phi + half_phi);
  col_lo = std::clamp(col_lo, 0, n_phi_ + 1);
  col_hi = std::clamp(col_hi, 0, n_phi_ + 1);
  const int row_lo = std::clamp(row_of(center.t - half_t), 0, n_t_ + 1);
  const int row_hi = std::clamp(row_of(center.t + half_t), 0, n_t_ + 1);

  for (int col = col_lo; col <= col_hi; ++col) {
    for (int row = row_lo; row <= row_hi; ++row) {
      assert(cell_index(col, row) < cells_.size());
      const Cell& cell = cells_[cell_index(col, row)];
      for (std::uint32_t i = cell.first; i < cell.first + cell.count; ++i) {
        const GridHit& h = hits_[i];
        // overlap copies carry shifted phi, so no wrap arithmetic here
        if (std::abs(h.phi - center.phi) <= half_phi &&
            std::abs(h.t - center.t) <= half_t) {
          out.push_back(&h);
        }
      }
    }
  }
}

}  // namespace trk
