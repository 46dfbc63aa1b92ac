#pragma once

#include <cstdint>

#include "trk/geometry.hpp"
#include "trk/types.hpp"

namespace trk {

/// Generator controls. Probabilities in [0, 1]; lengths in mm, momenta in
/// GeV. Defaults give a desk-scale event with every mechanism the finder
/// has to cope with: smearing, duplicate hits from module overlap, holes,
/// noise and labeled secondaries.
struct GenConfig {
  int n_primaries = 100;
  double pt_min = 0.15;   // log-uniform spectrum
  double pt_max = 10.0;
  double eta_min = -3.0;
  double eta_max = 3.0;
  double beamspot_sigma_z = 55.0;
  double xy_vertex_sigma = 0.01;
  double hit_sigma_pixel = 0.01;
  double hit_sigma_short_strip = 0.05;
  double hit_sigma_long_strip = 0.10;
  double duplicate_prob = 0.1;
  double noise_fraction = 0.05;     // of all hits in the event
  double secondary_fraction = 0.05; // secondaries per primary
  double secondary_r0_max = 200.0;  // mm, displaced-vertex radius
  double hole_prob = 0.02;          // a crossing yields no hit
  double bz_tesla = 2.0;
  std::uint64_t rng_seed = 1;

  enum class WeightMode { uniform, endpoint_boost };
  WeightMode weight_mode = WeightMode::uniform;
  double endpoint_boost = 2.0;  // weight factor for first/last hits

  void validate() const;

  /// Convenience: smearing, noise and holes off (duplicates stay on).
  GenConfig noiseless() const;
};

/// Deterministic event with exact ground truth: helical trajectories with
/// curvature 0.3 q Bz / pT intersected with every layer in traversal order.
Event generate_event(const GenConfig& config, std::int64_t event_id,
                     const Detector& detector);

/// Ground-truth assignment: every hit labeled with its truth particle
/// (noise stays 0). Throws ValidationError when truth is absent.
Solution ideal_solution(const Event& event);

}  // namespace trk
