#include "trk/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "trk/math.hpp"

namespace trk {

void Solution::canonicalize() {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.hit_id < b.hit_id; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].hit_id == entries[i - 1].hit_id) {
      throw ValidationError("solution assigns hit " +
                            std::to_string(entries[i].hit_id) + " twice");
    }
  }
}

std::int64_t Solution::track_of(std::int64_t hit_id) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), hit_id,
      [](const Entry& e, std::int64_t id) { return e.hit_id < id; });
  if (it == entries.end() || it->hit_id != hit_id) return 0;
  return it->track_id;
}

Kinematics kinematics(const Particle& particle) {
  const double pt = hypot_xy(particle.px, particle.py);
  const double p = std::sqrt(pt * pt + particle.pz * particle.pz);
  if (p <= 0.0) {
    throw ValidationError("kinematics of particle " +
                          std::to_string(particle.particle_id) +
                          ": zero momentum");
  }
  Kinematics k;
  k.pt = pt;
  k.phi = std::atan2(particle.py, particle.px);
  k.eta = std::asinh(particle.pz / pt);
  k.r0 = hypot_xy(particle.vx, particle.vy);
  k.z0 = particle.vz;
  return k;
}

void validate_event(const Event& event) {
  std::unordered_set<std::int64_t> hit_ids;
  hit_ids.reserve(event.hits.size());
  for (const Hit& h : event.hits) {
    if (h.hit_id <= 0) {
      throw ValidationError("event " + std::to_string(event.event_id) +
                            ": non-positive hit_id " +
                            std::to_string(h.hit_id));
    }
    if (!hit_ids.insert(h.hit_id).second) {
      throw ValidationError("event " + std::to_string(event.event_id) +
                            ": duplicate hit_id " + std::to_string(h.hit_id));
    }
  }

  std::unordered_set<std::int64_t> particle_ids;
  particle_ids.reserve(event.particles.size());
  for (const Particle& p : event.particles) {
    if (p.q != 1 && p.q != -1) {
      throw ValidationError("particle " + std::to_string(p.particle_id) +
                            ": charge must be +-1");
    }
    if (!particle_ids.insert(p.particle_id).second) {
      throw ValidationError("duplicate particle_id " +
                            std::to_string(p.particle_id));
    }
  }

  if (event.has_truth()) {
    std::unordered_map<std::int64_t, int> links_per_hit;
    links_per_hit.reserve(event.hits.size());
    for (const TruthLink& t : event.truth) {
      if (!hit_ids.count(t.hit_id)) {
        throw ValidationError("truth link references unknown hit " +
                              std::to_string(t.hit_id));
      }
      if (t.particle_id != 0 && !particle_ids.count(t.particle_id)) {
        throw ValidationError("truth link references unknown particle " +
                              std::to_string(t.particle_id));
      }
      if (t.weight < 0.0 || !std::isfinite(t.weight)) {
        throw ValidationError("truth link of hit " + std::to_string(t.hit_id) +
                              ": weight must be finite and non-negative");
      }
      if (++links_per_hit[t.hit_id] > 1) {
        throw ValidationError("hit " + std::to_string(t.hit_id) +
                              " has more than one truth link");
      }
    }
    for (std::int64_t id : hit_ids) {
      if (!links_per_hit.count(id)) {
        throw ValidationError("hit " + std::to_string(id) +
                              " has no truth link");
      }
    }
  }
}

}  // namespace trk
