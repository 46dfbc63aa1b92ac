#include "trk/tuner.hpp"

#include <map>
#include <unordered_map>

#include "trk/grid.hpp"

namespace trk {

HillClimbResult hill_climb(
    std::vector<double> params,
    const std::function<double(std::span<const double>)>& objective,
    const TuneOptions& options) {
  HillClimbResult result;
  result.value = objective(params);
  result.accepted_values.push_back(result.value);

  double step = options.initial_step;
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    result.iterations = iter;
    bool improved = false;
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (const double factor : {1.0 + step, 1.0 - step}) {
        // keep moving in this direction while it pays off
        while (true) {
          std::vector<double> trial = params;
          trial[i] = params[i] * factor;
          const double value = objective(trial);
          if (!(value > result.value)) break;
          params = std::move(trial);
          result.value = value;
          result.accepted_values.push_back(value);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < options.min_step) break;
  }
  result.params = std::move(params);
  return result;
}

std::vector<std::pair<std::string, double*>> tunable_parameters(
    PassConfig& pass) {
  std::vector<std::pair<std::string, double*>> params;
  if (!pass.use_origin_seed) {
    params.emplace_back("window_l2.dphi", &pass.window_l2.dphi);
    params.emplace_back("window_l2.dt", &pass.window_l2.dt);
  }
  params.emplace_back("window_l3.dphi", &pass.window_l3.dphi);
  params.emplace_back("window_l3.dt", &pass.window_l3.dt);
  params.emplace_back("pickup_window.dphi", &pass.pickup_window.dphi);
  params.emplace_back("pickup_window.dt", &pass.pickup_window.dt);
  params.emplace_back("z_residual_cut", &pass.z_residual_cut);
  for (auto& [key, window] : pass.layer_windows) {
    params.emplace_back("window " + to_string(key) + ".dphi", &window.dphi);
    params.emplace_back("window " + to_string(key) + ".dt", &window.dt);
  }
  return params;
}

double pass_criterion(const PassConfig& pass, std::span<const Event> events,
                      const Detector& detector, const FieldMap& field,
                      const TuneWeights& weights) {
  long n_matched = 0;
  long n_wrong = 0;

  for (const Event& event : events) {
    if (!event.has_truth()) {
      throw ValidationError("pass_criterion requires events with truth");
    }
    std::unordered_map<std::int64_t, std::int64_t> pid_of;
    pid_of.reserve(event.truth.size());
    for (const TruthLink& t : event.truth) pid_of.emplace(t.hit_id, t.particle_id);

    const auto& surfaces = detector.layers();
    std::vector<std::vector<Hit>> raw(surfaces.size());
    for (const Hit& h : event.hits) {
      raw[detector.index_of({h.volume_id, h.layer_id})].push_back(h);
    }
    std::vector<std::vector<GridHit>> hits(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      hits[i] = make_grid_hits(raw[i], surfaces[i], field);
    }

    PassRunner runner(detector, field, pass, std::move(hits));
    const auto accepted = select(runner.all_candidates(), pass);

    for (const TrackCandidate& track : accepted) {
      std::map<std::int64_t, int> counts;
      for (std::int64_t id : track.hit_ids) {
        const std::int64_t pid = pid_of.at(id);
        if (pid != 0) ++counts[pid];
      }
      int majority = 0;
      for (const auto& [pid, n] : counts) majority = std::max(majority, n);
      const int size = static_cast<int>(track.hit_ids.size());
      if (2 * majority > size) {
        ++n_matched;
        n_wrong += size - majority;
      } else {
        n_wrong += size;
      }
    }
  }
  return weights.w_found * static_cast<double>(n_matched) -
         weights.w_wrong * static_cast<double>(n_wrong);
}

TuneResult tune_pass(const PassConfig& pass, std::span<const Event> events,
                     const Detector& detector, const FieldMap& field,
                     const TuneWeights& weights, const TuneOptions& options) {
  if (events.empty()) {
    throw ValidationError("tune_pass requires at least one training event");
  }

  PassConfig working = pass;
  const auto handles = tunable_parameters(working);
  std::vector<double> params;
  params.reserve(handles.size());
  for (const auto& [name, ptr] : handles) params.push_back(*ptr);

  auto objective = [&](std::span<const double> values) {
    PassConfig trial = pass;
    const auto trial_handles = tunable_parameters(trial);
    for (std::size_t i = 0; i < trial_handles.size(); ++i) {
      *trial_handles[i].second = values[i];
    }
    try {
      return pass_criterion(trial, events, detector, field, weights);
    } catch (const ValidationError&) {
      // a step walked out of the valid range (e.g. phi window past pi)
      return -std::numeric_limits<double>::infinity();
    }
  };

  const HillClimbResult climb = hill_climb(std::move(params), objective, options);

  TuneResult result;
  result.config = pass;
  const auto out_handles = tunable_parameters(result.config);
  for (std::size_t i = 0; i < out_handles.size(); ++i) {
    *out_handles[i].second = climb.params[i];
  }
  result.criterion = climb.value;
  result.iterations = climb.iterations;
  result.accepted_values = climb.accepted_values;
  return result;
}

}  // namespace trk
