#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "trk/field_calib.hpp"
#include "trk/schedule.hpp"
#include "trk/synth.hpp"

namespace fs = std::filesystem;
using namespace trk;

TEST_CASE("the default schedule is valid and ordered tight to loose") {
  const Detector det = Detector::make_default();
  const Schedule s = make_default_schedule(det);
  CHECK(s.passes.size() == 12);
  s.validate(det);

  // three seeding configurations per tightness level
  CHECK(s.passes[0].base_layers.size() == 3);
  CHECK(s.passes[2].use_origin_seed);
  // cuts loosen monotonically across levels for the pixel passes
  for (int level = 1; level < 4; ++level) {
    const PassConfig& tighter = s.passes[3 * (level - 1)];
    const PassConfig& looser = s.passes[3 * level];
    CHECK(looser.window_l3.dphi > tighter.window_l3.dphi);
    CHECK(looser.z_residual_cut > tighter.z_residual_cut);
    CHECK(looser.selection_min_hits <= tighter.selection_min_hits);
  }
}

TEST_CASE("schedule round-trips through its file format") {
  const Detector det = Detector::make_default();
  const Schedule s = make_default_schedule(det);
  const fs::path file = fs::temp_directory_path() / "trk_schedule.cfg";
  save_schedule(s, file);
  const Schedule back = load_schedule(file);
  back.validate(det);

  REQUIRE(back.passes.size() == s.passes.size());
  for (std::size_t i = 0; i < s.passes.size(); ++i) {
    const PassConfig& a = s.passes[i];
    const PassConfig& b = back.passes[i];
    CHECK(a.name == b.name);
    CHECK(a.base_layers == b.base_layers);
    CHECK(a.use_origin_seed == b.use_origin_seed);
    CHECK(a.window_l2.dphi == b.window_l2.dphi);
    CHECK(a.window_l2.dt == b.window_l2.dt);
    CHECK(a.window_l3.dphi == b.window_l3.dphi);
    CHECK(a.pickup_window.dt == b.pickup_window.dt);
    CHECK(a.z_residual_cut == b.z_residual_cut);
    CHECK(a.max_missing_layers == b.max_missing_layers);
    CHECK(a.min_hits == b.min_hits);
    CHECK(a.selection_min_hits == b.selection_min_hits);
    CHECK(a.max_branches == b.max_branches);
    CHECK(a.edge_margin_mm == b.edge_margin_mm);
    REQUIRE(a.layer_windows.size() == b.layer_windows.size());
    for (const auto& [key, w] : a.layer_windows) {
      CHECK(b.layer_windows.at(key).dphi == w.dphi);
      CHECK(b.layer_windows.at(key).dt == w.dt);
    }
  }
}

TEST_CASE("the shipped schedule file matches the built-in default") {
  const Detector det = Detector::make_default();
  const Schedule builtin = make_default_schedule(det);
  const Schedule shipped =
      load_schedule(fs::path(TRK_SOURCE_DIR) / "config/default_schedule.cfg");
  shipped.validate(det);
  REQUIRE(shipped.passes.size() == builtin.passes.size());
  for (std::size_t i = 0; i < builtin.passes.size(); ++i) {
    CHECK(shipped.passes[i].name == builtin.passes[i].name);
    CHECK(shipped.passes[i].window_l3.dphi ==
          doctest::Approx(builtin.passes[i].window_l3.dphi));
    CHECK(shipped.passes[i].selection_min_hits ==
          builtin.passes[i].selection_min_hits);
    CHECK(shipped.passes[i].z_residual_cut ==
          doctest::Approx(builtin.passes[i].z_residual_cut));
  }
}

TEST_CASE("schedule parser reports broken input") {
  const fs::path file = fs::temp_directory_path() / "trk_bad_schedule.cfg";
  {
    std::ofstream out(file);
    out << "name = orphan\n";
  }
  CHECK_THROWS_AS(load_schedule(file), ValidationError);
  {
    std::ofstream out(file);
    out << "[[pass]]\nwindow_l2 = 0.1\n";  // missing dt
  }
  CHECK_THROWS_AS(load_schedule(file), ValidationError);
  {
    std::ofstream out(file);
    out << "[[pass]]\nnonsense = 1\n";
  }
  CHECK_THROWS_AS(load_schedule(file), ValidationError);
  CHECK_THROWS_AS(load_schedule(fs::temp_directory_path() / "nope.cfg"),
                  IoError);
}

TEST_CASE("field calibration recovers the uniform field from truth") {
  const Detector det = Detector::make_default();
  GenConfig cfg;
  cfg.n_primaries = 400;
  cfg.noise_fraction = 0.0;
  cfg.rng_seed = 61;
  std::vector<Event> events;
  for (int i = 0; i < 6; ++i) events.push_back(generate_event(cfg, i, det));

  const FieldMap fitted = fit_layer_fields(events, det, 2);
  for (const LayerSurface& s : det.layers()) {
    // evaluate inside the populated t range; the polynomial is a fit, not
    // an extrapolation contract
    for (double f : {0.35, 0.5, 0.65}) {
      const double t = s.t_min() + f * (s.t_max() - s.t_min());
      CHECK(fitted.at(s.key, t) == doctest::Approx(2.0).epsilon(0.05));
      CHECK(fitted.at(s.key, t, FieldVariant::inward) ==
            doctest::Approx(2.0).epsilon(0.05));
    }
  }
}
