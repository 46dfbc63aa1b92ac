#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trk {

/// Input files or user-supplied data failed a structural check.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One 3D measurement on a detector layer. Coordinates in mm.
struct Hit {
  std::int64_t hit_id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int volume_id = 0;
  int layer_id = 0;
  int module_id = 0;
};

/// A simulated particle. Vertex in mm, momentum in GeV, charge +-1.
struct Particle {
  std::int64_t particle_id = 0;
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;
  int q = 1;
  bool is_secondary = false;
};

/// Ground-truth association of one hit. particle_id 0 marks noise.
struct TruthLink {
  std::int64_t hit_id = 0;
  std::int64_t particle_id = 0;
  double weight = 0.0;
};

struct Event {
  std::int64_t event_id = 0;
  std::vector<Hit> hits;
  std::vector<Particle> particles;
  std::vector<TruthLink> truth;

  bool has_truth() const { return !truth.empty(); }
};

/// The hit -> track assignment submitted for scoring. Entries are kept
/// sorted by hit_id; track_id 0 means unassigned.
struct Solution {
  struct Entry {
    std::int64_t hit_id = 0;
    std::int64_t track_id = 0;
  };

  std::int64_t event_id = 0;
  std::vector<Entry> entries;

  /// Sorts entries by hit_id and rejects duplicate hit ids.
  void canonicalize();

  /// track_id of a hit, or 0 if the hit is not listed.
  std::int64_t track_of(std::int64_t hit_id) const;
};

/// Derived particle kinematics. Angles in rad, pT in GeV, lengths in mm.
struct Kinematics {
  double pt = 0.0;
  double phi = 0.0;
  double eta = 0.0;
  double r0 = 0.0;
  double z0 = 0.0;
};

/// pT, azimuth, pseudorapidity (eta = asinh(pz/pT), i.e. -ln tan(theta/2))
/// and vertex coordinates. Throws ValidationError for zero momentum.
Kinematics kinematics(const Particle& particle);

/// Structural checks: unique hit ids, exactly one truth link per hit when
/// truth is present, truth references resolve. Throws ValidationError.
void validate_event(const Event& event);

}  // namespace trk
