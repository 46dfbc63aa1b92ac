#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trk/math.hpp"
#include "trk/types.hpp"

namespace trk {

enum class Subdetector { pixel, short_strip, long_strip };

std::string to_string(Subdetector s);
Subdetector subdetector_from_string(const std::string& s);

struct LayerKey {
  int volume_id = 0;
  int layer_id = 0;
  auto operator<=>(const LayerKey&) const = default;
};

std::string to_string(const LayerKey& key);

struct CylinderSpec {
  double radius = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

struct DiskSpec {
  double z = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// One detection surface, parameterized by azimuth phi and a second
/// coordinate t (z on cylinders, r on disks).
struct LayerSurface {
  LayerKey key;
  std::variant<CylinderSpec, DiskSpec> shape;
  Subdetector subdetector = Subdetector::pixel;

  bool is_cylinder() const {
    return std::holds_alternative<CylinderSpec>(shape);
  }
  const CylinderSpec& cylinder() const { return std::get<CylinderSpec>(shape); }
  const DiskSpec& disk() const { return std::get<DiskSpec>(shape); }

  /// Range of the t coordinate covered by the surface.
  double t_min() const;
  double t_max() const;
};

/// Surface coordinates of a point.
struct SurfacePoint {
  double phi = 0.0;  // rad, (-pi, pi]
  double t = 0.0;    // mm
};

/// (phi, t) of a hit on its surface. Throws ValidationError when the hit is
/// off-surface by more than tolerance_mm.
SurfacePoint surface_coords(const Hit& hit, const LayerSurface& surface,
                            double tolerance_mm = 2.0);

/// Inverse of surface_coords: the 3D point at (phi, t) on the surface.
Vec3 surface_point(const SurfacePoint& p, const LayerSurface& surface);

class Detector {
 public:
  Detector() = default;
  explicit Detector(std::vector<LayerSurface> layers);

  /// Built-in layout: three pixel cylinders (r = 32/72/116 mm, |z| <= 500),
  /// three short-strip cylinders (260/360/500, |z| <= 1100), three
  /// long-strip cylinders (660/820/1020, |z| <= 1100) and one disk per side
  /// at |z| = 600 (r 120..500). Layers ordered by increasing radial reach.
  static Detector make_default();

  static Detector load_csv(const std::filesystem::path& file);
  void save_csv(const std::filesystem::path& file) const;

  const std::vector<LayerSurface>& layers() const { return layers_; }
  const LayerSurface& layer(const LayerKey& key) const;
  const LayerSurface* find(const LayerKey& key) const;
  std::size_t index_of(const LayerKey& key) const;

 private:
  std::vector<LayerSurface> layers_;           // canonical traversal order
  std::map<LayerKey, std::size_t> by_key_;
};

enum class FieldVariant { seed = 0, inward = 1, outward = 2 };

FieldVariant field_variant_from_string(const std::string& s);
std::string to_string(FieldVariant v);

/// Per-layer polynomial Bz(t) model, one coefficient set per variant.
struct LayerField {
  LayerKey key;
  std::array<std::vector<double>, 3> coeffs;  // indexed by FieldVariant
};

class FieldMap {
 public:
  FieldMap() = default;

  /// Same constant Bz for every layer and variant.
  static FieldMap uniform(const Detector& detector, double bz_tesla = 2.0);

  static FieldMap load_csv(const std::filesystem::path& file);
  void save_csv(const std::filesystem::path& file) const;

  /// Polynomial evaluation of Bz at coordinate t. Throws ValidationError
  /// for an unknown layer.
  double at(const LayerKey& key, double t,
            FieldVariant variant = FieldVariant::seed) const;

  void set(LayerField field);
  const std::map<LayerKey, LayerField>& layers() const { return fields_; }

 private:
  std::map<LayerKey, LayerField> fields_;
};

}  // namespace trk
