#include "trk/schedule.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "csv_util.hpp"

namespace trk {

namespace {

struct Level {
  const char* tag;
  double l2_dphi;       // curvature between origin-line and the second layer
  double l3_dphi;       // line-projection error at the third layer
  double l2_dt;         // beamspot-driven t window on the second layer
  double l3_dt;         // line-projection t window on the third layer
  double prolong_arc;   // prolongation window, mm of arc
  double prolong_dt;    // prolongation window, mm of t
  double z_cut;
  int min_hits;
  int selection_min_hits;
};

// tight passes first: high-momentum tracks under tight requirements, then
// progressively looser cuts until everything left is collected. The phi
// windows follow the curvature of the softest track each level targets
// (the third-layer projection error is (r3-r2)(r3-r1) / (2 R r3)).
constexpr std::array<Level, 4> kLevels{{
    {"tight", 0.016, 0.004, 360.0, 3.0, 2.4, 10.0, 1.5, 5, 9},
    {"mid", 0.040, 0.012, 480.0, 8.0, 6.0, 25.0, 4.0, 4, 7},
    {"loose", 0.090, 0.040, 600.0, 20.0, 14.0, 60.0, 10.0, 3, 5},
    {"final", 0.200, 0.140, 700.0, 50.0, 36.0, 150.0, 25.0, 3, 3},
}};

WindowSpec prolong_window(const LayerSurface& surface, double arc_full,
                          double dt_full) {
  const double r = surface.is_cylinder()
                       ? surface.cylinder().radius
                       : 0.5 * (surface.disk().r_min + surface.disk().r_max);
  return {std::min(arc_full / r, 0.5), dt_full};
}

PassConfig base_pass(const Detector& detector, const Level& level) {
  PassConfig p;
  p.window_l3 = {level.l3_dphi, level.l3_dt};
  p.pickup_window = {0.004, 1.5};
  p.z_residual_cut = level.z_cut;
  p.max_missing_layers = 1;
  p.min_hits = level.min_hits;
  p.selection_min_hits = level.selection_min_hits;
  p.max_branches = 4;
  for (const LayerSurface& s : detector.layers()) {
    p.layer_windows[s.key] =
        prolong_window(s, level.prolong_arc, level.prolong_dt);
  }
  return p;
}

}  // namespace

Schedule make_default_schedule(const Detector& detector) {
  Schedule schedule;
  for (const Level& level : kLevels) {
    {
      PassConfig p = base_pass(detector, level);
      p.name = std::string("pixel-") + level.tag;
      p.base_layers = {{8, 2}, {8, 4}, {8, 6}};
      p.window_l2 = {level.l2_dphi, level.l2_dt};
      schedule.passes.push_back(std::move(p));
    }
    {
      PassConfig p = base_pass(detector, level);
      p.name = std::string("mid-") + level.tag;
      p.base_layers = {{8, 4}, {8, 6}, {13, 2}};
      p.window_l2 = {level.l2_dphi, level.l2_dt};
      // much longer lever arm to the third layer
      p.window_l3.dphi = std::min(2.5 * level.l3_dphi, 0.5);
      p.window_l3.dt = 3.0 * level.l3_dt;
      schedule.passes.push_back(std::move(p));
    }
    {
      PassConfig p = base_pass(detector, level);
      p.name = std::string("doublet-") + level.tag;
      p.base_layers = {{8, 2}, {8, 4}};
      p.use_origin_seed = true;
      // the doublet seed has no third-layer line constraint; the search on
      // the second pixel layer covers curvature plus the projected beamspot
      p.window_l3 = {level.l2_dphi, level.l2_dt};
      // the origin point constrains the beam axis in xy only: its z
      // residual is the track's z0, spread by the beamspot
      p.z_residual_cut = std::max(level.z_cut, 300.0);
      schedule.passes.push_back(std::move(p));
    }
  }
  schedule.validate(detector);
  return schedule;
}

namespace {

LayerKey parse_layer_key(const std::string& token, int line_no,
                         const std::string& path) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    throw ValidationError(path + ":" + std::to_string(line_no) +
                          ": expected volume:layer, got '" + token + "'");
  }
  try {
    return {std::stoi(token.substr(0, colon)),
            std::stoi(token.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError(path + ":" + std::to_string(line_no) +
                          ": bad layer key '" + token + "'");
  }
}

}  // namespace

Schedule load_schedule(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open schedule " + file.string());
  const std::string path = file.string();

  Schedule schedule;
  PassConfig* current = nullptr;
  std::string line;
  int line_no = 0;

  auto fail = [&](const std::string& what) -> void {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;

    if (first == "[[pass]]") {
      schedule.passes.emplace_back();
      current = &schedule.passes.back();
      continue;
    }
    if (!current) fail("key before the first [[pass]] table");

    std::string key = first;
    std::string maybe_layer;
    ss >> maybe_layer;
    if (key == "window" && maybe_layer != "=") {
      std::string eq;
      ss >> eq;
      if (eq != "=") fail("expected '=' after window " + maybe_layer);
      const LayerKey lk = parse_layer_key(maybe_layer, line_no, path);
      WindowSpec w;
      if (!(ss >> w.dphi >> w.dt)) fail("window needs 'dphi dt'");
      current->layer_windows[lk] = w;
      continue;
    }
    if (maybe_layer != "=") fail("expected '=' after " + key);

    auto read_window = [&](WindowSpec& w) {
      if (!(ss >> w.dphi >> w.dt)) fail(key + " needs 'dphi dt'");
    };
    auto read_double = [&](double& v) {
      if (!(ss >> v)) fail(key + " needs a number");
    };
    auto read_int = [&](int& v) {
      if (!(ss >> v)) fail(key + " needs an integer");
    };

    if (key == "name") {
      ss >> current->name;
    } else if (key == "base_layers") {
      current->base_layers.clear();
      std::string tok;
      while (ss >> tok) {
        current->base_layers.push_back(parse_layer_key(tok, line_no, path));
      }
    } else if (key == "use_origin_seed") {
      std::string v;
      ss >> v;
      if (v != "true" && v != "false") fail("use_origin_seed must be true/false");
      current->use_origin_seed = v == "true";
    } else if (key == "window_l2") {
      read_window(current->window_l2);
    } else if (key == "window_l3") {
      read_window(current->window_l3);
    } else if (key == "pickup_window") {
      read_window(current->pickup_window);
    } else if (key == "z_residual_cut") {
      read_double(current->z_residual_cut);
    } else if (key == "edge_margin") {
      read_double(current->edge_margin_mm);
    } else if (key == "max_missing_layers") {
      read_int(current->max_missing_layers);
    } else if (key == "min_hits") {
      read_int(current->min_hits);
    } else if (key == "selection_min_hits") {
      read_int(current->selection_min_hits);
    } else if (key == "max_branches") {
      read_int(current->max_branches);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (schedule.passes.empty()) {
    throw ValidationError(path + ": no [[pass]] tables found");
  }
  return schedule;
}

void save_schedule(const Schedule& schedule, const std::filesystem::path& file) {
  auto out = detail::open_output(file);
  out << "# reconstruction schedule: one [[pass]] table per pass,\n"
         "# windows are full widths (rad, mm)\n";
  for (const PassConfig& p : schedule.passes) {
    out << "\n[[pass]]\n";
    if (!p.name.empty()) out << "name = " << p.name << '\n';
    out << "base_layers =";
    for (const LayerKey& k : p.base_layers) out << ' ' << to_string(k);
    out << '\n';
    out << "use_origin_seed = " << (p.use_origin_seed ? "true" : "false")
        << '\n';
    auto window = [&out](const char* key, const WindowSpec& w) {
      out << key << " = " << detail::format_double(w.dphi) << ' '
          << detail::format_double(w.dt) << '\n';
    };
    window("window_l2", p.window_l2);
    window("window_l3", p.window_l3);
    window("pickup_window", p.pickup_window);
    out << "z_residual_cut = " << detail::format_double(p.z_residual_cut)
        << '\n';
    out << "edge_margin = " << detail::format_double(p.edge_margin_mm) << '\n';
    out << "max_missing_layers = " << p.max_missing_layers << '\n';
    out << "min_hits = " << p.min_hits << '\n';
    out << "selection_min_hits = " << p.selection_min_hits << '\n';
    out << "max_branches = " << p.max_branches << '\n';
    for (const auto& [key, w] : p.layer_windows) {
      out << "window " << to_string(key) << " = "
          << detail::format_double(w.dphi) << ' ' << detail::format_double(w.dt)
          << '\n';
    }
  }
}

}  // namespace trk
