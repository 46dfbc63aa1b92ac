#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "trk/geometry.hpp"
#include "trk/math.hpp"

namespace fs = std::filesystem;
using namespace trk;

namespace {

Hit hit_at(double x, double y, double z) {
  Hit h;
  h.hit_id = 1;
  h.x = x;
  h.y = y;
  h.z = z;
  return h;
}

LayerSurface cylinder(double r, double zmax) {
  return {{8, 2}, CylinderSpec{r, -zmax, zmax}, Subdetector::pixel};
}

LayerSurface disk(double z, double rmin, double rmax) {
  return {{9, 2}, DiskSpec{z, rmin, rmax}, Subdetector::short_strip};
}

}  // namespace

TEST_CASE("surface_coords on cylinders and disks") {
  const auto cyl = cylinder(100.0, 1000.0);
  auto p = surface_coords(hit_at(100, 0, 50), cyl);
  CHECK(p.phi == doctest::Approx(0.0));
  CHECK(p.t == doctest::Approx(50.0));

  p = surface_coords(hit_at(0, -100, 50), cyl);
  CHECK(p.phi == doctest::Approx(-kPi / 2));
  CHECK(p.t == doctest::Approx(50.0));

  const auto d = disk(600.0, 0.0, 500.0);
  p = surface_coords(hit_at(30, 40, 600), d);
  CHECK(p.phi == doctest::Approx(std::atan2(40.0, 30.0)));
  CHECK(p.phi == doctest::Approx(0.9272952));
  CHECK(p.t == doctest::Approx(50.0));
}

TEST_CASE("surface_coords rejects off-surface hits") {
  const auto cyl = cylinder(100.0, 1000.0);
  CHECK_THROWS_AS(surface_coords(hit_at(110, 0, 0), cyl), ValidationError);
  CHECK_NOTHROW(surface_coords(hit_at(101, 0, 0), cyl));  // within 2 mm
  CHECK_THROWS_AS(
      surface_coords(hit_at(100, 0, 10), disk(600, 0, 500)), ValidationError);
}

TEST_CASE("surface_coords inverts surface_point to 1e-9 relative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uphi(-kPi, kPi);
  const auto cyl = cylinder(260.0, 1100.0);
  const auto d = disk(-600.0, 120.0, 500.0);
  std::uniform_real_distribution<double> uz(-1100.0, 1100.0);
  std::uniform_real_distribution<double> ur(120.0, 500.0);
  for (int i = 0; i < 1000; ++i) {
    {
      const SurfacePoint sp{uphi(rng), uz(rng)};
      const Vec3 v = surface_point(sp, cyl);
      const auto back = surface_coords(hit_at(v.x, v.y, v.z), cyl);
      CHECK(back.phi == doctest::Approx(sp.phi).epsilon(1e-9));
      CHECK(back.t == doctest::Approx(sp.t).epsilon(1e-9));
      CHECK(back.phi <= kPi);
      CHECK(back.phi > -kPi);
    }
    {
      const SurfacePoint sp{uphi(rng), ur(rng)};
      const Vec3 v = surface_point(sp, d);
      const auto back = surface_coords(hit_at(v.x, v.y, v.z), d);
      CHECK(back.phi == doctest::Approx(sp.phi).epsilon(1e-9));
      CHECK(back.t == doctest::Approx(sp.t).epsilon(1e-9));
    }
  }
}

TEST_CASE("default detector layout and ordering") {
  const Detector det = Detector::make_default();
  CHECK(det.layers().size() == 11);

  // ordered by radial reach
  double last_reach = 0.0;
  for (const LayerSurface& s : det.layers()) {
    const double reach = s.is_cylinder() ? s.cylinder().radius : s.disk().r_min;
    CHECK(reach >= last_reach);
    last_reach = reach;
  }

  CHECK(det.layer({8, 2}).cylinder().radius == doctest::Approx(32.0));
  CHECK(det.layer({13, 4}).cylinder().radius == doctest::Approx(360.0));
  CHECK(det.layer({17, 6}).cylinder().radius == doctest::Approx(1020.0));
  CHECK(det.layer({7, 2}).disk().z == doctest::Approx(-600.0));
  CHECK(det.layer({9, 2}).disk().z == doctest::Approx(600.0));
  CHECK(det.find({1, 1}) == nullptr);
  CHECK_THROWS_AS(det.layer({1, 1}), ValidationError);
}

TEST_CASE("geometry CSV round-trip and override") {
  const fs::path file = fs::temp_directory_path() / "trk_geom.csv";
  const Detector det = Detector::make_default();
  det.save_csv(file);
  const Detector back = Detector::load_csv(file);
  REQUIRE(back.layers().size() == det.layers().size());
  for (std::size_t i = 0; i < det.layers().size(); ++i) {
    CHECK(back.layers()[i].key == det.layers()[i].key);
    CHECK(back.layers()[i].is_cylinder() == det.layers()[i].is_cylinder());
    CHECK(back.layers()[i].subdetector == det.layers()[i].subdetector);
  }

  // a file with different pixel radii is honored
  const fs::path override_file = fs::temp_directory_path() / "trk_geom2.csv";
  {
    std::ofstream out(override_file);
    out << "volume_id,layer_id,kind,dim1,dim2,dim3,subdetector\n"
        << "8,2,C,40,-400,400,pixel\n"
        << "8,4,C,90,-400,400,pixel\n"
        << "9,2,D,700,100,400,short_strip\n";
  }
  const Detector custom = Detector::load_csv(override_file);
  CHECK(custom.layers().size() == 3);
  CHECK(custom.layer({8, 2}).cylinder().radius == doctest::Approx(40.0));
  CHECK(custom.layer({9, 2}).disk().z == doctest::Approx(700.0));
}

TEST_CASE("field evaluation") {
  const Detector det = Detector::make_default();
  const FieldMap field = FieldMap::uniform(det, 2.0);
  for (const LayerSurface& s : det.layers()) {
    for (double t : {s.t_min(), 0.5 * (s.t_min() + s.t_max()), s.t_max()}) {
      CHECK(field.at(s.key, t) == doctest::Approx(2.0));
      CHECK(field.at(s.key, t, FieldVariant::inward) == doctest::Approx(2.0));
      CHECK(field.at(s.key, t, FieldVariant::outward) == doctest::Approx(2.0));
    }
  }

  FieldMap custom;
  LayerField f;
  f.key = {8, 2};
  f.coeffs = {{{1.8, 0.0, -1e-7}, {2.0, -1e-3}, {2.0}}};
  custom.set(f);
  CHECK(custom.at({8, 2}, 0.0, FieldVariant::seed) == doctest::Approx(1.8));
  CHECK(custom.at({8, 2}, 1000.0, FieldVariant::inward) == doctest::Approx(1.0));
  CHECK_THROWS_AS(custom.at({1, 1}, 0.0), ValidationError);
}

TEST_CASE("field CSV round-trip") {
  const fs::path file = fs::temp_directory_path() / "trk_field.csv";
  FieldMap map;
  LayerField f;
  f.key = {8, 2};
  f.coeffs = {{{2.0, -1e-3, 1e-8}, {1.9}, {2.1, 0.5e-4}}};
  map.set(f);
  map.save_csv(file);
  const FieldMap back = FieldMap::load_csv(file);
  CHECK(back.at({8, 2}, 100.0, FieldVariant::seed) ==
        doctest::Approx(map.at({8, 2}, 100.0, FieldVariant::seed)));
  CHECK(back.at({8, 2}, 100.0, FieldVariant::inward) == doctest::Approx(1.9));
  CHECK(back.at({8, 2}, 100.0, FieldVariant::outward) ==
        doctest::Approx(2.1 + 0.5e-4 * 100.0));
}
