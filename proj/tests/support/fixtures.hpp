#pragma once

#include <cstdint>
#include <vector>

#include "trk/types.hpp"

namespace trk::testing {

/// Builder for tiny hand-written events: each hit sits on the pixel barrel
/// at a distinct position (the scorers never look at coordinates).
class MicroEvent {
 public:
  explicit MicroEvent(std::int64_t event_id = 0) { event_.event_id = event_id; }

  MicroEvent& particle(std::int64_t pid, bool secondary = false) {
    Particle p;
    p.particle_id = pid;
    p.px = 1.0;
    p.q = 1;
    p.is_secondary = secondary;
    event_.particles.push_back(p);
    return *this;
  }

  /// One hit of a particle (pid 0 = noise) with a truth weight.
  MicroEvent& hit(std::int64_t pid, double weight = 1.0) {
    Hit h;
    h.hit_id = next_hit_id_++;
    h.x = 32.0;
    h.y = 0.1 * static_cast<double>(h.hit_id);
    h.z = static_cast<double>(h.hit_id);
    h.volume_id = 8;
    h.layer_id = 2;
    h.module_id = 1;
    event_.hits.push_back(h);
    event_.truth.push_back({h.hit_id, pid, pid == 0 ? 0.0 : weight});
    return *this;
  }

  const Event& event() const { return event_; }

  /// Assignment listing one track_id per hit, in hit order.
  Solution assign(const std::vector<std::int64_t>& track_ids) const {
    Solution s;
    s.event_id = event_.event_id;
    for (std::size_t i = 0; i < event_.hits.size(); ++i) {
      s.entries.push_back({event_.hits[i].hit_id, track_ids.at(i)});
    }
    s.canonicalize();
    return s;
  }

 private:
  Event event_;
  std::int64_t next_hit_id_ = 1;
};

}  // namespace trk::testing
