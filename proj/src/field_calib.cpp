#include "trk/field_calib.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "trk/helix.hpp"
#include "trk/math.hpp"

namespace trk {

namespace {

// least-squares polynomial via normal equations; degree stays small
std::vector<double> polyfit(const std::vector<std::pair<double, double>>& samples,
                            int degree) {
  const int n = degree + 1;
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (const auto& [t, y] : samples) {
    std::vector<double> powers(2 * n - 1, 1.0);
    for (int i = 1; i < 2 * n - 1; ++i) powers[i] = powers[i - 1] * t;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m[r][c] += powers[r + c];
      m[r][n] += powers[r] * y;
    }
  }
  // Gaussian elimination with partial pivoting
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    if (std::abs(m[col][col]) < 1e-12) {
      throw ValidationError("field fit: singular normal equations");
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> coeffs(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = m[r][n];
    for (int c = r + 1; c < n; ++c) acc -= m[r][c] * coeffs[c];
    coeffs[r] = acc / m[r][r];
  }
  return coeffs;
}

}  // namespace

FieldMap fit_layer_fields(std::span<const Event> events,
                          const Detector& detector, int degree,
                          double default_bz) {
  if (degree < 0) throw ValidationError("field fit: degree must be >= 0");
  std::map<LayerKey, std::vector<std::pair<double, double>>> samples;

  for (const Event& event : events) {
    if (!event.has_truth()) continue;
    std::unordered_map<std::int64_t, const Particle*> particles;
    for (const Particle& p : event.particles) {
      particles.emplace(p.particle_id, &p);
    }
    std::unordered_map<std::int64_t, std::vector<const Hit*>> hits_of;
    std::unordered_map<std::int64_t, const TruthLink*> link_of;
    for (const TruthLink& t : event.truth) link_of.emplace(t.hit_id, &t);
    for (const Hit& h : event.hits) {
      const TruthLink* link = link_of.at(h.hit_id);
      if (link->particle_id != 0) hits_of[link->particle_id].push_back(&h);
    }

    for (auto& [pid, all_hits] : hits_of) {
      const Particle& particle = *particles.at(pid);
      const Kinematics kin = kinematics(particle);
      // order along the trajectory by distance from the vertex
      std::sort(all_hits.begin(), all_hits.end(),
                [&](const Hit* a, const Hit* b) {
                  auto d = [&](const Hit* h) {
                    const double dx = h->x - particle.vx,
                                 dy = h->y - particle.vy,
                                 dz = h->z - particle.vz;
                    return dx * dx + dy * dy + dz * dz;
                  };
                  return d(a) < d(b);
                });
      // one hit per layer: module-overlap duplicates make degenerate
      // triplets with runaway curvature
      std::vector<const Hit*> hits;
      for (const Hit* h : all_hits) {
        if (hits.empty() || hits.back()->volume_id != h->volume_id ||
            hits.back()->layer_id != h->layer_id) {
          hits.push_back(h);
        }
      }
      if (hits.size() < 3) continue;
      for (std::size_t i = 1; i + 1 < hits.size(); ++i) {
        const Vec3 a{hits[i - 1]->x, hits[i - 1]->y, hits[i - 1]->z};
        const Vec3 b{hits[i]->x, hits[i]->y, hits[i]->z};
        const Vec3 c{hits[i + 1]->x, hits[i + 1]->y, hits[i + 1]->z};
        ThreeHitHelix fit;
        try {
          fit = fit_three_hits(a, b, c, default_bz);
        } catch (const ValidationError&) {
          continue;
        }
        if (fit.is_line || fit.radius <= 0.0) continue;
        // sign from the turning sense and the truth charge
        const double bz = -fit.rot * particle.q * kin.pt /
                          (kCurvatureGevPerTeslaMm * fit.radius);
        const LayerSurface& surface =
            detector.layer({hits[i]->volume_id, hits[i]->layer_id});
        const SurfacePoint sp = surface_coords(*hits[i], surface);
        samples[surface.key].emplace_back(sp.t, bz);
      }
    }
  }

  FieldMap map;
  for (const LayerSurface& s : detector.layers()) {
    LayerField f;
    f.key = s.key;
    std::vector<double> coeffs{default_bz};
    auto it = samples.find(s.key);
    if (it != samples.end() &&
        static_cast<int>(it->second.size()) > 2 * (degree + 1)) {
      // smeared triplets of nearly straight tracks give runaway curvature
      // samples; trim around the median before the least squares
      std::vector<double> values;
      values.reserve(it->second.size());
      for (const auto& [t, bz] : it->second) values.push_back(bz);
      std::nth_element(values.begin(), values.begin() + values.size() / 2,
                       values.end());
      const double median = values[values.size() / 2];
      std::vector<std::pair<double, double>> trimmed;
      for (const auto& sample : it->second) {
        if (sample.second > 0.25 * median && sample.second < 4.0 * median) {
          trimmed.push_back(sample);
        }
      }
      if (static_cast<int>(trimmed.size()) > 2 * (degree + 1)) {
        coeffs = polyfit(trimmed, degree);
      }
    }
    f.coeffs = {coeffs, coeffs, coeffs};
    map.set(std::move(f));
  }
  return map;
}

}  // namespace trk
