#include "trk/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "csv_util.hpp"
#include "trk/math.hpp"

namespace trk {

std::string to_string(Subdetector s) {
  switch (s) {
    case Subdetector::pixel: return "pixel";
    case Subdetector::short_strip: return "short_strip";
    case Subdetector::long_strip: return "long_strip";
  }
  return "?";
}

Subdetector subdetector_from_string(const std::string& s) {
  if (s == "pixel") return Subdetector::pixel;
  if (s == "short_strip") return Subdetector::short_strip;
  if (s == "long_strip") return Subdetector::long_strip;
  throw ValidationError("unknown subdetector '" + s + "'");
}

std::string to_string(const LayerKey& key) {
  return std::to_string(key.volume_id) + ":" + std::to_string(key.layer_id);
}

double LayerSurface::t_min() const {
  return is_cylinder() ? cylinder().z_min : disk().r_min;
}

double LayerSurface::t_max() const {
  return is_cylinder() ? cylinder().z_max : disk().r_max;
}

SurfacePoint surface_coords(const Hit& hit, const LayerSurface& surface,
                            double tolerance_mm) {
  const double r = hypot_xy(hit.x, hit.y);
  double off;
  SurfacePoint p;
  p.phi = azimuth(hit.x, hit.y);
  if (surface.is_cylinder()) {
    off = std::abs(r - surface.cylinder().radius);
    p.t = hit.z;
  } else {
    off = std::abs(hit.z - surface.disk().z);
    p.t = r;
  }
  if (off > tolerance_mm) {
    throw ValidationError("hit " + std::to_string(hit.hit_id) + " is " +
                          std::to_string(off) + " mm off surface " +
                          to_string(surface.key));
  }
  return p;
}

Vec3 surface_point(const SurfacePoint& p, const LayerSurface& surface) {
  if (surface.is_cylinder()) {
    const double r = surface.cylinder().radius;
    return {r * std::cos(p.phi), r * std::sin(p.phi), p.t};
  }
  return {p.t * std::cos(p.phi), p.t * std::sin(p.phi), surface.disk().z};
}

namespace {

// Sort key: radial reach, then |z|, then z. Cylinders sort on their radius,
// disks on their inner radius.
std::tuple<double, double, double> traversal_key(const LayerSurface& s) {
  if (s.is_cylinder()) return {s.cylinder().radius, 0.0, 0.0};
  return {s.disk().r_min, std::abs(s.disk().z), s.disk().z};
}

void check_surface(const LayerSurface& s) {
  if (s.is_cylinder()) {
    const auto& c = s.cylinder();
    if (c.radius <= 0.0 || c.z_min >= c.z_max) {
      throw ValidationError("cylinder " + to_string(s.key) +
                            ": need radius > 0 and z_min < z_max");
    }
  } else {
    const auto& d = s.disk();
    if (d.r_min < 0.0 || d.r_min >= d.r_max) {
      throw ValidationError("disk " + to_string(s.key) +
                            ": need 0 <= r_min < r_max");
    }
  }
}

}  // namespace

Detector::Detector(std::vector<LayerSurface> layers)
    : layers_(std::move(layers)) {
  std::stable_sort(layers_.begin(), layers_.end(),
                   [](const LayerSurface& a, const LayerSurface& b) {
                     return traversal_key(a) < traversal_key(b);
                   });
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    check_surface(layers_[i]);
    if (!by_key_.emplace(layers_[i].key, i).second) {
      throw ValidationError("duplicate layer key " +
                            to_string(layers_[i].key));
    }
  }
}

Detector Detector::make_default() {
  std::vector<LayerSurface> layers;
  auto cyl = [&](int vol, int lay, double r, double zmax, Subdetector sub) {
    layers.push_back({{vol, lay}, CylinderSpec{r, -zmax, zmax}, sub});
  };
  cyl(8, 2, 32.0, 500.0, Subdetector::pixel);
  cyl(8, 4, 72.0, 500.0, Subdetector::pixel);
  cyl(8, 6, 116.0, 500.0, Subdetector::pixel);
  cyl(13, 2, 260.0, 1100.0, Subdetector::short_strip);
  cyl(13, 4, 360.0, 1100.0, Subdetector::short_strip);
  cyl(13, 6, 500.0, 1100.0, Subdetector::short_strip);
  cyl(17, 2, 660.0, 1100.0, Subdetector::long_strip);
  cyl(17, 4, 820.0, 1100.0, Subdetector::long_strip);
  cyl(17, 6, 1020.0, 1100.0, Subdetector::long_strip);
  layers.push_back({{7, 2}, DiskSpec{-600.0, 120.0, 500.0},
                    Subdetector::short_strip});
  layers.push_back({{9, 2}, DiskSpec{600.0, 120.0, 500.0},
                    Subdetector::short_strip});
  return Detector(std::move(layers));
}

Detector Detector::load_csv(const std::filesystem::path& file) {
  detail::CsvReader reader(file);
  reader.expect_header("volume_id,layer_id,kind,dim1,dim2,dim3,subdetector");
  std::vector<LayerSurface> layers;
  std::vector<std::string_view> f;
  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 7) reader.fail("expected 7 fields");
    LayerSurface s;
    s.key = {static_cast<int>(reader.parse_int(f[0])),
             static_cast<int>(reader.parse_int(f[1]))};
    const double d1 = reader.parse_double(f[3]);
    const double d2 = reader.parse_double(f[4]);
    const double d3 = reader.parse_double(f[5]);
    if (f[2] == "C") {
      s.shape = CylinderSpec{d1, d2, d3};
    } else if (f[2] == "D") {
      s.shape = DiskSpec{d1, d2, d3};
    } else {
      reader.fail("kind must be C or D");
    }
    s.subdetector = subdetector_from_string(std::string(f[6]));
    layers.push_back(s);
  }
  return Detector(std::move(layers));
}

void Detector::save_csv(const std::filesystem::path& file) const {
  auto out = detail::open_output(file);
  out << "volume_id,layer_id,kind,dim1,dim2,dim3,subdetector\n";
  for (const LayerSurface& s : layers_) {
    out << s.key.volume_id << ',' << s.key.layer_id << ',';
    if (s.is_cylinder()) {
      const auto& c = s.cylinder();
      out << "C," << detail::format_double(c.radius) << ','
          << detail::format_double(c.z_min) << ','
          << detail::format_double(c.z_max);
    } else {
      const auto& d = s.disk();
      out << "D," << detail::format_double(d.z) << ','
          << detail::format_double(d.r_min) << ','
          << detail::format_double(d.r_max);
    }
    out << ',' << to_string(s.subdetector) << '\n';
  }
}

const LayerSurface& Detector::layer(const LayerKey& key) const {
  const LayerSurface* s = find(key);
  if (!s) throw ValidationError("unknown layer " + to_string(key));
  return *s;
}

const LayerSurface* Detector::find(const LayerKey& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &layers_[it->second];
}

std::size_t Detector::index_of(const LayerKey& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) {
    throw ValidationError("unknown layer " + to_string(key));
  }
  return it->second;
}

FieldVariant field_variant_from_string(const std::string& s) {
  if (s == "seed") return FieldVariant::seed;
  if (s == "inward") return FieldVariant::inward;
  if (s == "outward") return FieldVariant::outward;
  throw ValidationError("unknown field variant '" + s + "'");
}

std::string to_string(FieldVariant v) {
  switch (v) {
    case FieldVariant::seed: return "seed";
    case FieldVariant::inward: return "inward";
    case FieldVariant::outward: return "outward";
  }
  return "?";
}

FieldMap FieldMap::uniform(const Detector& detector, double bz_tesla) {
  FieldMap map;
  for (const LayerSurface& s : detector.layers()) {
    LayerField f;
    f.key = s.key;
    f.coeffs = {{{bz_tesla}, {bz_tesla}, {bz_tesla}}};
    map.set(std::move(f));
  }
  return map;
}

FieldMap FieldMap::load_csv(const std::filesystem::path& file) {
  detail::CsvReader reader(file);
  reader.expect_header("volume_id,layer_id,variant,c0,c1,c2,...");
  FieldMap map;
  std::vector<std::string_view> f;
  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() < 4) reader.fail("expected at least one coefficient");
    LayerKey key{static_cast<int>(reader.parse_int(f[0])),
                 static_cast<int>(reader.parse_int(f[1]))};
    const FieldVariant variant = field_variant_from_string(std::string(f[2]));
    std::vector<double> coeffs;
    for (std::size_t i = 3; i < f.size(); ++i) {
      coeffs.push_back(reader.parse_double(f[i]));
    }
    auto [it, inserted] = map.fields_.try_emplace(key);
    if (inserted) it->second.key = key;
    it->second.coeffs[static_cast<int>(variant)] = std::move(coeffs);
  }
  return map;
}

void FieldMap::save_csv(const std::filesystem::path& file) const {
  auto out = detail::open_output(file);
  out << "volume_id,layer_id,variant,c0,c1,c2,...\n";
  for (const auto& [key, field] : fields_) {
    for (int v = 0; v < 3; ++v) {
      out << key.volume_id << ',' << key.layer_id << ','
          << to_string(static_cast<FieldVariant>(v));
      for (double c : field.coeffs[v]) out << ',' << detail::format_double(c);
      out << '\n';
    }
  }
}

double FieldMap::at(const LayerKey& key, double t, FieldVariant variant) const {
  auto it = fields_.find(key);
  if (it == fields_.end()) {
    throw ValidationError("no field model for layer " + to_string(key));
  }
  const std::vector<double>& c = it->second.coeffs[static_cast<int>(variant)];
  double bz = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) bz = bz * t + c[i];
  return bz;
}

void FieldMap::set(LayerField field) {
  fields_[field.key] = std::move(field);
}

}  // namespace trk
