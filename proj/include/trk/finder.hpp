#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trk/geometry.hpp"
#include "trk/grid.hpp"
#include "trk/helix.hpp"
#include "trk/types.hpp"

namespace trk {

struct WindowSpec {
  double dphi = 0.0;  // rad, full width
  double dt = 0.0;    // mm, full width
};

/// All parameters of one reconstruction pass. Windows are full widths; the
/// per-layer grids are built with cell sizes covering every window that can
/// query the layer during the pass.
struct PassConfig {
  std::string name;
  std::vector<LayerKey> base_layers;  // 3, or 2 with use_origin_seed
  bool use_origin_seed = false;       // seed from (0,0,0) plus two layers
  WindowSpec window_l2;               // seeding search on the second layer
  WindowSpec window_l3;               // seeding search on the third layer
  WindowSpec pickup_window;           // same-layer duplicate pickup
  std::map<LayerKey, WindowSpec> layer_windows;  // prolongation, per layer
  double z_residual_cut = 5.0;        // mm, seed acceptance
  int max_missing_layers = 1;
  int min_hits = 3;
  int selection_min_hits = 3;
  int max_branches = 4;               // per seed tracklet
  double edge_margin_mm = 10.0;       // near-edge band of a crossing

  void validate(const Detector& detector) const;
};

struct Schedule {
  std::vector<PassConfig> passes;
  void validate(const Detector& detector) const;
};

/// A grown (or seed) track hypothesis. hit_ids are in traversal order with
/// a parallel per-hit distance from the trajectory that found it; seed hits
/// contribute zero.
struct TrackCandidate {
  std::vector<std::int64_t> hit_ids;
  std::vector<double> hit_deviation;  // mm
  ThreeHitHelix helix;                // last recreated trajectory
  int n_missing = 0;

  double deviation_sum() const;
  double mean_deviation() const {
    return hit_ids.empty() ? 0.0 : deviation_sum() / hit_ids.size();
  }
};

struct Track {
  std::int64_t track_id = 0;
  std::vector<std::int64_t> hit_ids;
  int pass_index = 0;
};

struct RunTrace {
  struct PassStats {
    int n_seeds = 0;
    int n_candidates = 0;
    int n_accepted = 0;
    std::size_t n_assigned_total = 0;
  };
  std::vector<PassStats> passes;
};

struct FinderOptions {
  int workers = 2;
  RunTrace* trace = nullptr;
};

/// Greedy best-candidate selection: repeatedly accept the candidate with
/// the most hits (ties: smaller mean deviation, then smaller lowest hit_id,
/// then lexicographic hit_ids), stop when the best has fewer than
/// selection_min_hits, and strip accepted hits from the remaining
/// candidates, discarding any that fall below min_hits.
std::vector<TrackCandidate> select(std::vector<TrackCandidate> candidates,
                                   const PassConfig& pass);

/// One pass over one set of surviving hits: seeding, prolongation with
/// branching and duplicate pickup, grid-backed window queries.
class PassRunner {
 public:
  PassRunner(const Detector& detector, const FieldMap& field,
             const PassConfig& pass,
             std::vector<std::vector<GridHit>> hits_by_layer);
  ~PassRunner();
  PassRunner(const PassRunner&) = delete;
  PassRunner& operator=(const PassRunner&) = delete;

  /// Hits on the first combinatorial layer; work is partitioned by this
  /// index across workers.
  std::size_t seed_count() const;

  /// Seeding plus depth-first prolongation for one first-layer hit.
  void candidates_for_seed(std::size_t seed_index,
                           std::vector<TrackCandidate>& out) const;

  /// Accepted seed tracklets (before prolongation) for one first-layer hit.
  void tracklets_for_seed(std::size_t seed_index,
                          std::vector<TrackCandidate>& out) const;

  /// All seed tracklets of the pass, in seed order.
  std::vector<TrackCandidate> construct_tracklets() const;

  /// Prolongs one seed tracklet, emitting every completed candidate with at
  /// least min_hits hits.
  void prolong(const TrackCandidate& seed,
               std::vector<TrackCandidate>& out) const;

  /// All candidates of the pass, in seed order (single-threaded).
  std::vector<TrackCandidate> all_candidates() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class MikadoFinder {
 public:
  MikadoFinder(const Detector& detector, const FieldMap& field)
      : detector_(detector), field_(field) {}

  /// Full multi-pass reconstruction. Accepted tracks get ids 1..N in
  /// acceptance order; their hits are removed before the next pass.
  std::vector<Track> find_tracks(const Event& event, const Schedule& schedule,
                                 const FinderOptions& options = {}) const;

  /// find_tracks plus the final hit -> track assignment (0 = unassigned).
  Solution run(const Event& event, const Schedule& schedule,
               const FinderOptions& options = {}) const;

 private:
  const Detector& detector_;
  const FieldMap& field_;
};

/// mm distance between two surface points, the azimuthal part scaled to arc
/// length (cylinder radius, or the reference point's r on a disk).
double surface_distance_mm(const LayerSurface& surface, const SurfacePoint& ref,
                           const SurfacePoint& other);

}  // namespace trk
