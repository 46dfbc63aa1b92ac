#include "trk/finder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "trk/math.hpp"

namespace trk {

double surface_distance_mm(const LayerSurface& surface, const SurfacePoint& ref,
                           const SurfacePoint& other) {
  const double dphi = wrap_pm_pi(other.phi - ref.phi);
  const double scale =
      surface.is_cylinder() ? surface.cylinder().radius : ref.t;
  const double arc = scale * dphi;
  const double dt = other.t - ref.t;
  return std::sqrt(arc * arc + dt * dt);
}

double TrackCandidate::deviation_sum() const {
  double sum = 0.0;
  for (double d : hit_deviation) sum += d;
  return sum;
}

namespace {

void check_window(const WindowSpec& w, const std::string& what) {
  if (!(w.dphi > 0.0) || !(w.dt > 0.0)) {
    throw ValidationError(what + " window must be positive");
  }
  if (w.dphi > kPi) {
    throw ValidationError(what + " phi window must not exceed pi");
  }
}

}  // namespace

void PassConfig::validate(const Detector& detector) const {
  const bool two_layer = base_layers.size() == 2;
  if (!(two_layer || base_layers.size() == 3)) {
    throw ValidationError("pass '" + name + "': need 2 or 3 base layers");
  }
  if (two_layer != use_origin_seed) {
    throw ValidationError("pass '" + name +
                          "': 2 base layers require use_origin_seed and "
                          "3 base layers forbid it");
  }
  std::set<LayerKey> seen;
  for (const LayerKey& key : base_layers) {
    detector.layer(key);  // throws on unknown layer
    if (!seen.insert(key).second) {
      throw ValidationError("pass '" + name + "': duplicate base layer " +
                            to_string(key));
    }
  }
  if (!use_origin_seed) check_window(window_l2, "pass '" + name + "' l2");
  check_window(window_l3, "pass '" + name + "' l3");
  check_window(pickup_window, "pass '" + name + "' pickup");
  for (const LayerSurface& s : detector.layers()) {
    auto it = layer_windows.find(s.key);
    if (it == layer_windows.end()) {
      throw ValidationError("pass '" + name + "': no window for layer " +
                            to_string(s.key));
    }
    check_window(it->second, "pass '" + name + "' layer " + to_string(s.key));
  }
  if (!(z_residual_cut > 0.0)) {
    throw ValidationError("pass '" + name + "': z_residual_cut must be > 0");
  }
  if (min_hits < 3) {
    throw ValidationError("pass '" + name + "': min_hits must be >= 3");
  }
  if (selection_min_hits < min_hits) {
    throw ValidationError("pass '" + name +
                          "': selection_min_hits must be >= min_hits");
  }
  if (max_missing_layers < 0 || max_branches < 0) {
    throw ValidationError("pass '" + name + "': negative budget");
  }
}

void Schedule::validate(const Detector& detector) const {
  if (passes.empty()) throw ValidationError("schedule has no passes");
  for (const PassConfig& p : passes) p.validate(detector);
}

namespace {

Vec3 position(const GridHit& h) { return {h.x, h.y, h.z}; }

SurfacePoint canonical_point(const GridHit& h) {
  return {azimuth(h.x, h.y), h.t};
}

bool xy_close(const Vec3& a, const Vec3& b) {
  return hypot_xy(a.x - b.x, a.y - b.y) < 1e-9;
}

struct RankedHit {
  const GridHit* hit = nullptr;
  double d2 = 0.0;
};

}  // namespace

struct PassRunner::Impl {
  const Detector& detector;
  const FieldMap& field;
  const PassConfig& pass;

  struct LayerCtx {
    const LayerSurface* surface = nullptr;
    std::vector<GridHit> source;
    LayerGrid grid;
    WindowSpec window;  // prolongation window of this pass
  };
  std::vector<LayerCtx> layers;
  std::vector<std::size_t> base;  // indices of base layers
  // hit_id -> (layer index, index in source)
  std::unordered_map<std::int64_t, std::pair<std::size_t, std::size_t>> by_id;

  Impl(const Detector& det, const FieldMap& fld, const PassConfig& cfg,
       std::vector<std::vector<GridHit>> hits_by_layer)
      : detector(det), field(fld), pass(cfg) {
    pass.validate(detector);
    const auto& surfaces = detector.layers();
    if (hits_by_layer.size() != surfaces.size()) {
      throw ValidationError("hits_by_layer does not match detector layers");
    }
    for (const LayerKey& key : pass.base_layers) {
      base.push_back(detector.index_of(key));
    }

    layers.resize(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      LayerCtx& lc = layers[i];
      lc.surface = &surfaces[i];
      lc.source = std::move(hits_by_layer[i]);
      lc.window = pass.layer_windows.at(surfaces[i].key);

      // the grid cell covers every window that can query this layer
      WindowSpec cell = lc.window;
      if (!pass.use_origin_seed && i == base[1]) {
        cell.dphi = std::max(cell.dphi, pass.window_l2.dphi);
        cell.dt = std::max(cell.dt, pass.window_l2.dt);
      }
      if (i == base.back()) {
        cell.dphi = std::max(cell.dphi, pass.window_l3.dphi);
        cell.dt = std::max(cell.dt, pass.window_l3.dt);
      }
      cell.dphi = std::max(cell.dphi, pass.pickup_window.dphi);
      cell.dt = std::max(cell.dt, pass.pickup_window.dt);

      lc.grid = LayerGrid::build(surfaces[i], lc.source, cell.dphi, cell.dt);
      for (std::size_t j = 0; j < lc.source.size(); ++j) {
        by_id.emplace(lc.source[j].hit_id, std::make_pair(i, j));
      }
    }
  }

  // --- search primitives ----------------------------------------------

  /// Window query ranked by elliptical distance from the center, ties by
  /// hit_id. The ranking uses the canonical azimuth recomputed from (x, y)
  /// so overlap copies rank exactly like their originals.
  std::vector<RankedHit> ranked_query(const LayerCtx& lc,
                                      const SurfacePoint& center,
                                      const WindowSpec& window) const {
    std::vector<const GridHit*> found;
    lc.grid.query_window(center, window.dphi, window.dt, found);
    std::vector<RankedHit> ranked;
    ranked.reserve(found.size());
    for (const GridHit* h : found) {
      const double dphi = wrap_pm_pi(azimuth(h->x, h->y) - center.phi);
      ranked.push_back(
          {h, window_distance_sq(dphi, h->t - center.t, 0.5 * window.dphi,
                                 0.5 * window.dt)});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedHit& a, const RankedHit& b) {
                if (a.d2 != b.d2) return a.d2 < b.d2;
                return a.hit->hit_id < b.hit->hit_id;
              });
    return ranked;
  }

  /// Duplicate pickup around an accepted hit: the recreated trajectory
  /// passes through it, so the tiny window is centered on the hit itself.
  std::vector<RankedHit> pickup_list(const LayerCtx& lc,
                                     const GridHit& anchor) const {
    std::vector<RankedHit> list =
        ranked_query(lc, canonical_point(anchor), pass.pickup_window);
    std::erase_if(list, [&](const RankedHit& r) {
      return r.hit->hit_id == anchor.hit_id;
    });
    return list;
  }

  // --- growth state ------------------------------------------------------

  struct Chosen {
    const GridHit* hit = nullptr;
    std::size_t layer = 0;
    double dev = 0.0;
  };

  struct GrowState {
    std::vector<Chosen> hits;                 // traversal order
    std::vector<const GridHit*> anchors;      // one per distinct layer
    ThreeHitHelix helix;
    int n_missing = 0;
    std::vector<bool> visited;
    bool stopped = false;  // missing budget exhausted
  };

  struct Ctx {
    int branch_budget = 0;
    std::vector<TrackCandidate>* out = nullptr;
  };

  void emit(const GrowState& s, Ctx& ctx) const {
    if (static_cast<int>(s.hits.size()) < pass.min_hits) return;
    TrackCandidate c;
    c.hit_ids.reserve(s.hits.size());
    c.hit_deviation.reserve(s.hits.size());
    for (const Chosen& h : s.hits) {
      c.hit_ids.push_back(h.hit->hit_id);
      c.hit_deviation.push_back(h.dev);
    }
    c.helix = s.helix;
    c.n_missing = s.n_missing;
    ctx.out->push_back(std::move(c));
  }

  /// Appends an anchor hit plus its duplicate pickups and recreates the
  /// trajectory from the last three anchors (first three when extending
  /// inward).
  void apply_hit(GrowState& s, std::size_t layer_index, const Crossing& cross,
                 const GridHit* hit, Direction dir,
                 const std::vector<RankedHit>& pickups) const {
    const LayerCtx& lc = layers[layer_index];
    std::vector<Chosen> added;
    added.push_back({hit, layer_index,
                     surface_distance_mm(*lc.surface, cross.point,
                                         canonical_point(*hit))});
    const SurfacePoint anchor_point = canonical_point(*hit);
    for (const RankedHit& p : pickups) {
      added.push_back({p.hit, layer_index,
                       surface_distance_mm(*lc.surface, anchor_point,
                                           canonical_point(*p.hit))});
    }

    if (dir == Direction::outward) {
      s.hits.insert(s.hits.end(), added.begin(), added.end());
      s.anchors.push_back(hit);
      const std::size_t n = s.anchors.size();
      if (n >= 3) {
        s.helix = fit_three_hits(position(*s.anchors[n - 3]),
                                 position(*s.anchors[n - 2]),
                                 position(*s.anchors[n - 1]),
                                 hit->bz[static_cast<int>(FieldVariant::outward)]);
      }
    } else {
      s.hits.insert(s.hits.begin(), added.begin(), added.end());
      s.anchors.insert(s.anchors.begin(), hit);
      if (s.anchors.size() >= 3) {
        s.helix = fit_three_hits(position(*s.anchors[0]),
                                 position(*s.anchors[1]),
                                 position(*s.anchors[2]),
                                 hit->bz[static_cast<int>(FieldVariant::inward)]);
      }
    }
  }

  /// Re-anchors the working trajectory on the three innermost hits before
  /// the inward sweep.
  void switch_to_inward(GrowState& s) const {
    if (s.anchors.size() < 3) return;  // keep the seed helix
    s.helix = fit_three_hits(
        position(*s.anchors[0]), position(*s.anchors[1]),
        position(*s.anchors[2]),
        s.anchors[0]->bz[static_cast<int>(FieldVariant::inward)]);
  }

  /// One sweep over the unvisited layers in trajectory order: extrapolate
  /// to the nearest-crossing layer, take the closest in-window hit, pick up
  /// duplicates, branch on leftovers, count interior misses.
  void extend(GrowState& s, Direction dir, Ctx& ctx) const {
    while (true) {
      std::size_t best_layer = layers.size();
      Crossing best_cross;
      for (std::size_t i = 0; i < layers.size(); ++i) {
        if (s.visited[i]) continue;
        const auto cross =
            extrapolate(s.helix, *layers[i].surface, dir, pass.edge_margin_mm);
        if (!cross) continue;
        const bool better = dir == Direction::outward
                                ? cross->arc < best_cross.arc
                                : cross->arc > best_cross.arc;
        if (best_layer == layers.size() || better) {
          best_layer = i;
          best_cross = *cross;
        }
      }
      if (best_layer == layers.size()) return;  // no reachable layer left

      s.visited[best_layer] = true;
      const LayerCtx& lc = layers[best_layer];
      const auto ranked = ranked_query(lc, best_cross.point, lc.window);

      if (ranked.empty()) {
        if (best_cross.kind == CrossingKind::interior) {
          if (++s.n_missing > pass.max_missing_layers) {
            s.stopped = true;
            return;
          }
        }
        continue;
      }

      const GridHit* closest = ranked[0].hit;
      const auto pickups = pickup_list(lc, *closest);

      // leftovers in the window spawn alternative branches
      for (std::size_t i = 1; i < ranked.size(); ++i) {
        const GridHit* alt = ranked[i].hit;
        const bool picked =
            std::any_of(pickups.begin(), pickups.end(), [&](const RankedHit& p) {
              return p.hit->hit_id == alt->hit_id;
            });
        if (picked) continue;
        if (ctx.branch_budget == 0) break;
        --ctx.branch_budget;
        GrowState branch = s;
        apply_hit(branch, best_layer, best_cross, alt, dir,
                  pickup_list(lc, *alt));
        finish(std::move(branch), dir, ctx);
      }

      apply_hit(s, best_layer, best_cross, closest, dir, pickups);
    }
  }

  /// Runs the remaining sweeps from the given phase and emits the result.
  void finish(GrowState s, Direction dir, Ctx& ctx) const {
    if (dir == Direction::outward) {
      extend(s, Direction::outward, ctx);
      if (!s.stopped) {
        switch_to_inward(s);
        extend(s, Direction::inward, ctx);
      }
    } else {
      extend(s, Direction::inward, ctx);
    }
    emit(s, ctx);
  }

  // --- seeding -----------------------------------------------------------

  GrowState seed_state(const GridHit* h1, const GridHit* h2, const GridHit* h3,
                       std::size_t l1, std::size_t l2, std::size_t l3,
                       const ThreeHitHelix& helix) const {
    GrowState s;
    s.helix = helix;
    s.visited.assign(layers.size(), false);
    auto add_anchor = [&](const GridHit* h, std::size_t layer) {
      if (!h) return;
      s.visited[layer] = true;
      s.anchors.push_back(h);
      s.hits.push_back({h, layer, 0.0});
      for (const RankedHit& p : pickup_list(layers[layer], *h)) {
        s.hits.push_back({p.hit, layer,
                          surface_distance_mm(*layers[layer].surface,
                                              canonical_point(*h),
                                              canonical_point(*p.hit))});
      }
    };
    add_anchor(h1, l1);
    add_anchor(h2, l2);
    add_anchor(h3, l3);
    return s;
  }

  void tracklets_for_seed(std::size_t index, Ctx& ctx) const {
    constexpr Vec3 kOrigin{0.0, 0.0, 0.0};
    const int seed_bz = static_cast<int>(FieldVariant::seed);

    if (pass.use_origin_seed) {
      const LayerCtx& l2 = layers[base[0]];
      const LayerCtx& l3 = layers[base[1]];
      const GridHit& h2 = l2.source[index];
      const auto p3 = line_project_unbounded(kOrigin, position(h2), *l3.surface);
      if (!p3) return;
      for (const RankedHit& r3 : ranked_query(l3, *p3, pass.window_l3)) {
        const GridHit& h3 = *r3.hit;
        if (xy_close(position(h2), position(h3))) continue;
        const ThreeHitHelix helix = fit_three_hits(
            kOrigin, position(h2), position(h3), h3.bz[seed_bz]);
        if (z_residual(helix, kOrigin) > pass.z_residual_cut) continue;
        GrowState s = seed_state(&h2, &h3, nullptr, base[0], base[1], 0, helix);
        emit_seed(std::move(s), ctx);
      }
      return;
    }

    const LayerCtx& l1 = layers[base[0]];
    const LayerCtx& l2 = layers[base[1]];
    const LayerCtx& l3 = layers[base[2]];
    const GridHit& h1 = l1.source[index];
    const auto p2 = line_project_unbounded(kOrigin, position(h1), *l2.surface);
    if (!p2) return;
    for (const RankedHit& r2 : ranked_query(l2, *p2, pass.window_l2)) {
      const GridHit& h2 = *r2.hit;
      const auto p3 = line_project_unbounded(position(h1), position(h2), *l3.surface);
      if (!p3) continue;
      for (const RankedHit& r3 : ranked_query(l3, *p3, pass.window_l3)) {
        const GridHit& h3 = *r3.hit;
        if (xy_close(position(h1), position(h2)) ||
            xy_close(position(h2), position(h3)) ||
            xy_close(position(h1), position(h3))) {
          continue;
        }
        const ThreeHitHelix helix = fit_three_hits(
            position(h1), position(h2), position(h3), h3.bz[seed_bz]);
        if (z_residual(helix, position(h1)) > pass.z_residual_cut) continue;
        GrowState s = seed_state(&h1, &h2, &h3, base[0], base[1], base[2], helix);
        emit_seed(std::move(s), ctx);
      }
    }
  }

  void emit_seed(GrowState s, Ctx& ctx) const {
    TrackCandidate c;
    for (const Chosen& h : s.hits) {
      c.hit_ids.push_back(h.hit->hit_id);
      c.hit_deviation.push_back(h.dev);
    }
    c.helix = s.helix;
    c.n_missing = s.n_missing;
    ctx.out->push_back(std::move(c));
  }

  GrowState state_from_candidate(const TrackCandidate& c) const {
    GrowState s;
    s.helix = c.helix;
    s.n_missing = c.n_missing;
    s.visited.assign(layers.size(), false);
    for (std::size_t i = 0; i < c.hit_ids.size(); ++i) {
      auto it = by_id.find(c.hit_ids[i]);
      if (it == by_id.end()) {
        throw ValidationError("candidate hit " + std::to_string(c.hit_ids[i]) +
                              " is not among this pass's hits");
      }
      const auto [layer, idx] = it->second;
      const GridHit* hit = &layers[layer].source[idx];
      if (!s.visited[layer]) {
        s.anchors.push_back(hit);  // first hit of a layer is its anchor
        s.visited[layer] = true;
      }
      s.hits.push_back({hit, layer, c.hit_deviation[i]});
    }
    return s;
  }
};

PassRunner::PassRunner(const Detector& detector, const FieldMap& field,
                       const PassConfig& pass,
                       std::vector<std::vector<GridHit>> hits_by_layer)
    : impl_(std::make_unique<Impl>(detector, field, pass,
                                   std::move(hits_by_layer))) {}

PassRunner::~PassRunner() = default;

std::size_t PassRunner::seed_count() const {
  return impl_->layers[impl_->base[0]].source.size();
}

void PassRunner::tracklets_for_seed(std::size_t seed_index,
                                    std::vector<TrackCandidate>& out) const {
  Impl::Ctx ctx{0, &out};
  impl_->tracklets_for_seed(seed_index, ctx);
}

std::vector<TrackCandidate> PassRunner::construct_tracklets() const {
  std::vector<TrackCandidate> out;
  for (std::size_t i = 0; i < seed_count(); ++i) tracklets_for_seed(i, out);
  return out;
}

void PassRunner::prolong(const TrackCandidate& seed,
                         std::vector<TrackCandidate>& out) const {
  Impl::Ctx ctx{impl_->pass.max_branches, &out};
  impl_->finish(impl_->state_from_candidate(seed), Direction::outward, ctx);
}

void PassRunner::candidates_for_seed(std::size_t seed_index,
                                     std::vector<TrackCandidate>& out) const {
  std::vector<TrackCandidate> seeds;
  tracklets_for_seed(seed_index, seeds);
  for (const TrackCandidate& seed : seeds) prolong(seed, out);
}

std::vector<TrackCandidate> PassRunner::all_candidates() const {
  std::vector<TrackCandidate> out;
  for (std::size_t i = 0; i < seed_count(); ++i) candidates_for_seed(i, out);
  return out;
}

namespace {

struct SelectionEntry {
  TrackCandidate candidate;
  std::int64_t min_hit_id = 0;
  double dev_sum = 0.0;
  bool alive = true;

  void refresh() {
    min_hit_id = candidate.hit_ids.empty()
                     ? std::numeric_limits<std::int64_t>::max()
                     : *std::min_element(candidate.hit_ids.begin(),
                                         candidate.hit_ids.end());
    dev_sum = candidate.deviation_sum();
  }

  double mean_dev() const {
    return candidate.hit_ids.empty()
               ? 0.0
               : dev_sum / candidate.hit_ids.size();
  }
};

bool better_candidate(const SelectionEntry& a, const SelectionEntry& b) {
  if (a.candidate.hit_ids.size() != b.candidate.hit_ids.size()) {
    return a.candidate.hit_ids.size() > b.candidate.hit_ids.size();
  }
  const double da = a.mean_dev();
  const double db = b.mean_dev();
  if (da != db) return da < db;
  if (a.min_hit_id != b.min_hit_id) return a.min_hit_id < b.min_hit_id;
  return a.candidate.hit_ids < b.candidate.hit_ids;
}

}  // namespace

std::vector<TrackCandidate> select(std::vector<TrackCandidate> candidates,
                                   const PassConfig& pass) {
  std::vector<SelectionEntry> pool;
  pool.reserve(candidates.size());
  for (TrackCandidate& c : candidates) {
    SelectionEntry e;
    e.candidate = std::move(c);
    e.refresh();
    if (static_cast<int>(e.candidate.hit_ids.size()) >= pass.min_hits) {
      pool.push_back(std::move(e));
    }
  }

  std::vector<TrackCandidate> accepted;
  while (true) {
    SelectionEntry* best = nullptr;
    for (SelectionEntry& e : pool) {
      if (!e.alive) continue;
      if (!best || better_candidate(e, *best)) best = &e;
    }
    if (!best) break;
    if (static_cast<int>(best->candidate.hit_ids.size()) <
        pass.selection_min_hits) {
      break;
    }
    best->alive = false;
    std::unordered_set<std::int64_t> used(best->candidate.hit_ids.begin(),
                                          best->candidate.hit_ids.end());
    accepted.push_back(best->candidate);

    for (SelectionEntry& e : pool) {
      if (!e.alive) continue;
      TrackCandidate& c = e.candidate;
      bool touched = false;
      std::size_t w = 0;
      for (std::size_t r = 0; r < c.hit_ids.size(); ++r) {
        if (used.count(c.hit_ids[r])) {
          touched = true;
          continue;
        }
        c.hit_ids[w] = c.hit_ids[r];
        c.hit_deviation[w] = c.hit_deviation[r];
        ++w;
      }
      if (!touched) continue;
      c.hit_ids.resize(w);
      c.hit_deviation.resize(w);
      if (static_cast<int>(w) < pass.min_hits) {
        e.alive = false;
      } else {
        e.refresh();
      }
    }
  }
  return accepted;
}

std::vector<Track> MikadoFinder::find_tracks(const Event& event,
                                             const Schedule& schedule,
                                             const FinderOptions& options) const {
  schedule.validate(detector_);
  if (options.workers < 1) {
    throw ValidationError("finder needs at least one worker");
  }

  // split the event once into per-layer flat hit records
  const auto& surfaces = detector_.layers();
  std::vector<std::vector<Hit>> raw(surfaces.size());
  for (const Hit& h : event.hits) {
    raw[detector_.index_of({h.volume_id, h.layer_id})].push_back(h);
  }
  std::vector<std::vector<GridHit>> layer_hits(surfaces.size());
  std::vector<std::vector<bool>> alive(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    layer_hits[i] = make_grid_hits(raw[i], surfaces[i], field_);
    alive[i].assign(layer_hits[i].size(), true);
  }
  std::unordered_map<std::int64_t, std::pair<std::size_t, std::size_t>> where;
  for (std::size_t i = 0; i < layer_hits.size(); ++i) {
    for (std::size_t j = 0; j < layer_hits[i].size(); ++j) {
      where.emplace(layer_hits[i][j].hit_id, std::make_pair(i, j));
    }
  }

  std::vector<Track> tracks;
  std::size_t n_assigned = 0;
  if (options.trace) options.trace->passes.clear();

  for (std::size_t pass_index = 0; pass_index < schedule.passes.size();
       ++pass_index) {
    const PassConfig& pass = schedule.passes[pass_index];

    std::vector<std::vector<GridHit>> surviving(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      surviving[i] = retain(layer_hits[i], alive[i]);
    }
    PassRunner runner(detector_, field_, pass, std::move(surviving));

    const std::size_t slots = runner.seed_count();
    std::vector<std::vector<TrackCandidate>> per_slot(slots);

    const int n_workers =
        std::max(1, std::min<int>(options.workers, static_cast<int>(slots)));
    if (n_workers <= 1) {
      for (std::size_t i = 0; i < slots; ++i) {
        runner.candidates_for_seed(i, per_slot[i]);
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(n_workers);
      for (int w = 0; w < n_workers; ++w) {
        threads.emplace_back([&, w] {
          try {
            while (true) {
              const std::size_t i = next.fetch_add(1);
              if (i >= slots) break;
              runner.candidates_for_seed(i, per_slot[i]);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (std::thread& t : threads) t.join();
      for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }

    std::vector<TrackCandidate> pool;
    std::size_t total = 0;
    for (const auto& v : per_slot) total += v.size();
    pool.reserve(total);
    for (auto& v : per_slot) {
      for (TrackCandidate& c : v) pool.push_back(std::move(c));
    }

    const int n_seeds = static_cast<int>(slots);
    const int n_candidates = static_cast<int>(pool.size());
    std::vector<TrackCandidate> chosen = select(std::move(pool), pass);

    for (TrackCandidate& c : chosen) {
      Track t;
      t.track_id = static_cast<std::int64_t>(tracks.size()) + 1;
      t.pass_index = static_cast<int>(pass_index);
      t.hit_ids = std::move(c.hit_ids);
      for (std::int64_t id : t.hit_ids) {
        const auto [li, hi] = where.at(id);
        alive[li][hi] = false;
      }
      n_assigned += t.hit_ids.size();
      tracks.push_back(std::move(t));
    }

    if (options.trace) {
      options.trace->passes.push_back(
          {n_seeds, n_candidates,
           static_cast<int>(chosen.size()), n_assigned});
    }
  }
  return tracks;
}

Solution MikadoFinder::run(const Event& event, const Schedule& schedule,
                           const FinderOptions& options) const {
  const std::vector<Track> tracks = find_tracks(event, schedule, options);
  std::unordered_map<std::int64_t, std::int64_t> assignment;
  for (const Track& t : tracks) {
    for (std::int64_t id : t.hit_ids) assignment.emplace(id, t.track_id);
  }
  Solution s;
  s.event_id = event.event_id;
  s.entries.reserve(event.hits.size());
  for (const Hit& h : event.hits) {
    auto it = assignment.find(h.hit_id);
    s.entries.push_back({h.hit_id, it == assignment.end() ? 0 : it->second});
  }
  s.canonicalize();
  return s;
}

}  // namespace trk
