#include "trk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trk/math.hpp"

namespace trk {

namespace {

void check_prob(double p, const char* name) {
  if (p < 0.0 || p > 1.0) {
    throw ValidationError(std::string("GenConfig.") + name +
                          " must be in [0, 1]");
  }
}

struct ExactHelix {
  double cx = 0.0, cy = 0.0;  // circle center in xy
  double radius = 0.0;        // mm
  double alpha0 = 0.0;        // azimuth of the vertex about the center
  int turn = 1;               // +1 clockwise (alpha decreasing), -1 ccw
  double z0 = 0.0;
  double dz_ds = 0.0;         // pz / pT

  Vec3 at(double s) const {
    const double a = alpha0 - turn * s / radius;
    return {cx + radius * std::cos(a), cy + radius * std::sin(a),
            z0 + dz_ds * s};
  }
};

ExactHelix make_helix(const Particle& p, double bz) {
  const double pt = hypot_xy(p.px, p.py);
  ExactHelix h;
  h.radius = pt / (kCurvatureGevPerTeslaMm * std::abs(bz));
  h.turn = p.q * bz > 0.0 ? 1 : -1;  // positive charge turns clockwise
  const double psi = std::atan2(p.py, p.px);
  h.cx = p.vx + h.radius * h.turn * std::sin(psi);
  h.cy = p.vy - h.radius * h.turn * std::cos(psi);
  h.alpha0 = azimuth(p.vx - h.cx, p.vy - h.cy);
  h.z0 = p.vz;
  h.dz_ds = p.pz / pt;
  return h;
}

struct LayerCrossing {
  std::size_t layer_index = 0;
  double s = 0.0;
  Vec3 point;
};

// First forward crossing with each layer; one hit at most per layer.
std::vector<LayerCrossing> cross_layers(const ExactHelix& h,
                                        const Detector& detector) {
  std::vector<LayerCrossing> crossings;
  constexpr double kMinArc = 1e-9;
  for (std::size_t i = 0; i < detector.layers().size(); ++i) {
    const LayerSurface& surface = detector.layers()[i];
    if (surface.is_cylinder()) {
      const auto& c = surface.cylinder();
      const double d = hypot_xy(h.cx, h.cy);
      if (d <= 0.0) continue;
      const double cos_a =
          (d * d + c.radius * c.radius - h.radius * h.radius) /
          (2.0 * d * c.radius);
      if (cos_a < -1.0 || cos_a > 1.0) continue;
      const double half = std::acos(cos_a);
      const double phi_center = azimuth(h.cx, h.cy);
      double best_s = 0.0;
      bool found = false;
      for (double phi : {phi_center + half, phi_center - half}) {
        const double x = c.radius * std::cos(phi);
        const double y = c.radius * std::sin(phi);
        const double ap = azimuth(x - h.cx, y - h.cy);
        double s = h.radius * wrap_two_pi(h.turn * (h.alpha0 - ap));
        if (s <= kMinArc) continue;
        if (!found || s < best_s) {
          found = true;
          best_s = s;
        }
      }
      if (!found) continue;
      const Vec3 p = h.at(best_s);
      if (p.z < c.z_min || p.z > c.z_max) continue;
      crossings.push_back({i, best_s, p});
    } else {
      const auto& dsk = surface.disk();
      if (h.dz_ds == 0.0) continue;
      const double s = (dsk.z - h.z0) / h.dz_ds;
      if (s <= kMinArc) continue;
      const Vec3 p = h.at(s);
      const double r = hypot_xy(p.x, p.y);
      if (r < dsk.r_min || r > dsk.r_max) continue;
      crossings.push_back({i, s, p});
    }
  }
  std::sort(crossings.begin(), crossings.end(),
            [](const LayerCrossing& a, const LayerCrossing& b) {
              return a.s < b.s;
            });
  return crossings;
}

double sigma_for(const GenConfig& cfg, Subdetector sub) {
  switch (sub) {
    case Subdetector::pixel: return cfg.hit_sigma_pixel;
    case Subdetector::short_strip: return cfg.hit_sigma_short_strip;
    case Subdetector::long_strip: return cfg.hit_sigma_long_strip;
  }
  return 0.0;
}

// Gaussian displacement in the surface tangent plane, keeping the hit on
// the surface: along (arc, z) for cylinders, (arc, r) for disks.
Vec3 smear_on_surface(const Vec3& p, const LayerSurface& surface, double sigma,
                      double n1, double n2) {
  const double phi = azimuth(p.x, p.y);
  if (surface.is_cylinder()) {
    const double r = surface.cylinder().radius;
    const double phi2 = phi + sigma * n1 / r;
    return {r * std::cos(phi2), r * std::sin(phi2), p.z + sigma * n2};
  }
  const double r = hypot_xy(p.x, p.y);
  const double phi2 = phi + sigma * n1 / std::max(r, 1.0);
  const double r2 = r + sigma * n2;
  return {r2 * std::cos(phi2), r2 * std::sin(phi2), p.z};
}

}  // namespace

void GenConfig::validate() const {
  if (n_primaries < 0) throw ValidationError("GenConfig.n_primaries < 0");
  if (!(pt_min > 0.0) || pt_max < pt_min) {
    throw ValidationError("GenConfig.pt range must satisfy 0 < min <= max");
  }
  if (eta_max < eta_min) throw ValidationError("GenConfig.eta range inverted");
  check_prob(duplicate_prob, "duplicate_prob");
  check_prob(secondary_fraction, "secondary_fraction");
  check_prob(hole_prob, "hole_prob");
  if (noise_fraction < 0.0 || noise_fraction >= 1.0) {
    throw ValidationError("GenConfig.noise_fraction must be in [0, 1)");
  }
  if (bz_tesla == 0.0) throw ValidationError("GenConfig.bz_tesla must be nonzero");
}

GenConfig GenConfig::noiseless() const {
  GenConfig c = *this;
  c.hit_sigma_pixel = 0.0;
  c.hit_sigma_short_strip = 0.0;
  c.hit_sigma_long_strip = 0.0;
  c.noise_fraction = 0.0;
  c.hole_prob = 0.0;
  return c;
}

Event generate_event(const GenConfig& config, std::int64_t event_id,
                     const Detector& detector) {
  config.validate();

  const std::uint64_t stream =
      static_cast<std::uint64_t>(event_id) + UINT64_C(0x9e3779b97f4a7c15);
  std::seed_seq seq{static_cast<std::uint64_t>(config.rng_seed), stream};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform_in = [&](double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
  };

  Event event;
  event.event_id = event_id;

  const int n_secondaries =
      static_cast<int>(std::llround(config.n_primaries * config.secondary_fraction));
  const int n_particles = config.n_primaries + n_secondaries;

  for (int i = 0; i < n_particles; ++i) {
    Particle p;
    p.particle_id = i + 1;
    p.is_secondary = i >= config.n_primaries;

    const double pt =
        std::exp(uniform_in(std::log(config.pt_min), std::log(config.pt_max)));
    const double eta = uniform_in(config.eta_min, config.eta_max);
    const double phi = uniform_in(-kPi, kPi);
    p.q = unit(rng) < 0.5 ? 1 : -1;
    p.px = pt * std::cos(phi);
    p.py = pt * std::sin(phi);
    p.pz = pt * std::sinh(eta);

    if (p.is_secondary) {
      const double r0 = uniform_in(0.0, config.secondary_r0_max);
      const double vphi = uniform_in(-kPi, kPi);
      p.vx = r0 * std::cos(vphi);
      p.vy = r0 * std::sin(vphi);
      p.vz = config.beamspot_sigma_z * gauss(rng);
    } else {
      p.vx = config.xy_vertex_sigma * gauss(rng);
      p.vy = config.xy_vertex_sigma * gauss(rng);
      p.vz = config.beamspot_sigma_z * gauss(rng);
    }
    event.particles.push_back(p);
  }

  std::int64_t next_hit_id = 1;
  auto add_hit = [&](const Vec3& pos, const LayerSurface& surface, int module,
                     std::int64_t pid, double weight) {
    Hit h;
    h.hit_id = next_hit_id++;
    h.x = pos.x;
    h.y = pos.y;
    h.z = pos.z;
    h.volume_id = surface.key.volume_id;
    h.layer_id = surface.key.layer_id;
    h.module_id = module;
    event.hits.push_back(h);
    event.truth.push_back({h.hit_id, pid, weight});
  };

  for (const Particle& p : event.particles) {
    const ExactHelix helix = make_helix(p, config.bz_tesla);
    const auto crossings = cross_layers(helix, detector);
    const std::size_t first_hit_index = event.hits.size();
    for (const LayerCrossing& c : crossings) {
      const LayerSurface& surface = detector.layers()[c.layer_index];
      const double sigma = sigma_for(config, surface.subdetector);
      const bool hole = unit(rng) < config.hole_prob;
      const double n1 = gauss(rng), n2 = gauss(rng);
      const bool dup = unit(rng) < config.duplicate_prob;
      const double d1 = gauss(rng), d2 = gauss(rng);
      if (hole) continue;
      add_hit(smear_on_surface(c.point, surface, sigma, n1, n2), surface, 1,
              p.particle_id, 1.0);
      if (dup) {
        add_hit(smear_on_surface(c.point, surface, sigma, d1, d2), surface, 2,
                p.particle_id, 1.0);
      }
    }
    if (config.weight_mode == GenConfig::WeightMode::endpoint_boost &&
        event.hits.size() > first_hit_index) {
      event.truth[first_hit_index].weight *= config.endpoint_boost;
      event.truth.back().weight *= config.endpoint_boost;
    }
  }

  // noise_fraction is the share of noise in the final event
  if (config.noise_fraction > 0.0 && !detector.layers().empty()) {
    const double n_track_hits = static_cast<double>(event.hits.size());
    const int n_noise = static_cast<int>(std::llround(
        n_track_hits * config.noise_fraction / (1.0 - config.noise_fraction)));
    std::uniform_int_distribution<std::size_t> pick_layer(
        0, detector.layers().size() - 1);
    for (int i = 0; i < n_noise; ++i) {
      const LayerSurface& surface = detector.layers()[pick_layer(rng)];
      const double phi = uniform_in(-kPi, kPi);
      const double t = uniform_in(surface.t_min(), surface.t_max());
      add_hit(surface_point({phi, t}, surface), surface, 3, 0, 0.0);
    }
  }

  validate_event(event);
  return event;
}

Solution ideal_solution(const Event& event) {
  if (!event.has_truth()) {
    throw ValidationError("ideal_solution requires ground truth");
  }
  Solution s;
  s.event_id = event.event_id;
  s.entries.reserve(event.truth.size());
  for (const TruthLink& t : event.truth) {
    s.entries.push_back({t.hit_id, t.particle_id});
  }
  s.canonicalize();
  return s;
}

}  // namespace trk
