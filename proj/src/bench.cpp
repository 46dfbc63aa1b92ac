#include "trk/bench.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace trk {

ScoreReport bench(std::span<const Event> events, const FinderRunner& runner,
                  int repetitions) {
  using clock = std::chrono::steady_clock;

  ScoreReport report;
  report.n_events = static_cast<int>(events.size());
  if (events.empty() || repetitions < 1) {
    report.valid = false;
    report.error = "bench needs at least one event and one repetition";
    return report;
  }

  std::vector<Solution> solutions;
  solutions.reserve(events.size());
  try {
    for (int rep = 0; rep < repetitions; ++rep) {
      double total = 0.0;
      for (const Event& event : events) {
        const auto start = clock::now();
        Solution solution = runner(event);
        const auto stop = clock::now();
        total += std::chrono::duration<double>(stop - start).count();
        if (rep == 0) solutions.push_back(std::move(solution));
      }
      report.per_repetition_time_sec.push_back(total / events.size());
    }
  } catch (const std::exception& e) {
    report.valid = false;
    report.error = e.what();
    return report;
  }

  const auto& reps = report.per_repetition_time_sec;
  const double mean =
      std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  report.mean_time_sec = mean;
  if (reps.size() > 1 && mean > 0.0) {
    double max_dev = 0.0;
    for (double t : reps) max_dev = std::max(max_dev, std::abs(t - mean));
    report.time_spread_rel = max_dev / mean;
  }

  double acc_sum = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double a = accuracy_score(events[i], solutions[i]);
    report.per_event_accuracy.push_back(a);
    acc_sum += a;
  }
  report.accuracy = acc_sum / events.size();
  // over the per-event budget the run is disqualified outright
  report.throughput =
      mean >= 600.0 ? 0.0 : throughput_score(report.accuracy, mean);
  return report;
}

}  // namespace trk
