#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trk/geometry.hpp"

namespace trk {

/// Flat per-layer copy of a hit: surface coordinates, position, id and the
/// cached field value per variant, so the search loops never chase the
/// source event.
struct GridHit {
  double phi = 0.0;
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  std::int64_t hit_id = 0;
  std::array<double, 3> bz{};  // indexed by FieldVariant
};

/// GridHits of all event hits on one layer, in event order.
std::vector<GridHit> make_grid_hits(std::span<const Hit> hits,
                                    const LayerSurface& surface,
                                    const FieldMap& field,
                                    double tolerance_mm = 2.0);

/// Survivors of a hit-removal pass; the mask runs parallel to hits.
std::vector<GridHit> retain(std::span<const GridHit> hits,
                            const std::vector<bool>& alive_mask);

/// Regular (phi, t) grid over one layer surface. Interior cells tile phi in
/// (-pi, pi] and t over the layer bounds with cell sizes at least as large
/// as the requested search window. One ring of border cells surrounds the
/// interior; the phi border columns hold copies of the opposite edge's hits
/// with phi shifted by +-2pi, so a window query never branches on wrap.
class LayerGrid {
 public:
  LayerGrid() = default;

  /// Two passes over the hits and two over the cells: count, prefix-sum,
  /// scatter, then fill the overlap columns.
  static LayerGrid build(const LayerSurface& surface,
                         std::span<const GridHit> hits, double window_phi,
                         double window_t);

  /// Hits within the half-window box around the center, gathered from the
  /// <= 4 cells the window overlaps. center.phi must be in (-pi, pi].
  void query(const SurfacePoint& center, std::vector<const GridHit*>& out) const {
    query_window(center, window_phi_, window_t_, out);
  }

  /// Same with an explicit window no larger than the build window (used for
  /// the tiny duplicate-pickup searches).
  void query_window(const SurfacePoint& center, double window_phi,
                    double window_t, std::vector<const GridHit*>& out) const;

  std::size_t hit_count() const { return n_source_hits_; }
  int n_phi() const { return n_phi_; }
  int n_t() const { return n_t_; }
  double cell_phi() const { return cell_phi_; }
  double cell_t() const { return cell_t_; }
  double window_phi() const { return window_phi_; }
  double window_t() const { return window_t_; }

  struct Cell {
    std::uint32_t first = 0;
    std::uint32_t count = 0;
  };
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<GridHit>& hits() const { return hits_; }

 private:
  int col_of(double phi) const;    // padded column, unclamped
  int row_of(double t) const;      // padded row, unclamped
  std::size_t cell_index(int col, int row) const {
    return static_cast<std::size_t>(col) * (n_t_ + 2) + row;
  }

  double window_phi_ = 0.0, window_t_ = 0.0;  // requested window
  double cell_phi_ = 0.0, cell_t_ = 0.0;      // effective cell sizes
  double t_min_ = 0.0;
  int n_phi_ = 0, n_t_ = 0;  // interior cell counts
  std::size_t n_source_hits_ = 0;
  std::vector<Cell> cells_;
  std::vector<GridHit> hits_;
};

}  // namespace trk
