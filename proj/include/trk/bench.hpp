#pragma once

#include <functional>
#include <span>
#include <vector>

#include "trk/score.hpp"
#include "trk/types.hpp"

namespace trk {

/// Everything score/analyze/bench report about one run.
struct ScoreReport {
  bool valid = true;
  int n_events = 0;
  double accuracy = 0.0;                 // mean of per-event accuracies
  std::vector<double> per_event_accuracy;
  std::optional<double> mean_time_sec;   // per event, finder code only
  std::vector<double> per_repetition_time_sec;
  // reproducibility of the timing: max |t_rep - mean| / mean
  double time_spread_rel = 0.0;
  std::optional<double> throughput;      // Eq-style combined score
  std::string error;                     // set when valid == false
};

using FinderRunner = std::function<Solution(const Event&)>;

/// Wall-clock benchmark: events are already in memory, only the runner
/// invocation is timed. The mean per-event time is averaged over
/// repetitions; accuracy comes from the first repetition's solutions.
/// A runner failure marks the report invalid.
ScoreReport bench(std::span<const Event> events, const FinderRunner& runner,
                  int repetitions = 1);

}  // namespace trk
