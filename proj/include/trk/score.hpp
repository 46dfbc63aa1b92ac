#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trk/types.hpp"

namespace trk {

struct AccuracyOptions {
  /// Also require the majority particle's hits in the track to exceed 50%
  /// of that particle's own hits (counted, not weighted).
  bool double_majority = false;
};

/// Weighted fraction of hits correctly assigned. A hit is correct iff its
/// truth particle is primary, it sits in a track whose weight-majority
/// particle is that particle, and the majority is strict (> 50% of the
/// track's summed weight). Secondaries and noise are excluded from both
/// numerator and denominator. Returns 0 when the event carries no primary
/// weight.
double accuracy_score(const Event& event, const Solution& solution,
                      const AccuracyOptions& opts = {});

/// sqrt(ln(1 + t_max/t) * (S - S_min)^2); 0 when S <= S_min. Throws
/// ValidationError for t <= 0.
double throughput_score(double accuracy, double seconds_per_event,
                        double t_max = 600.0, double s_min = 0.5);

struct ParticleMatch {
  std::int64_t particle_id = 0;
  int n_hits = 0;
  bool matched = false;
};

struct EfficiencyResult {
  double efficiency = 0.0;
  int n_matched = 0;
  int n_primaries = 0;  // primaries with at least one hit
  std::vector<ParticleMatch> particles;
};

/// A primary is matched when one track holds a strict majority (> 50%) of
/// its hits, by plain hit count. Primaries without hits are not counted.
EfficiencyResult particle_efficiency(const Event& event,
                                     const Solution& solution);

enum class KinVariable { log10_pt, phi, eta, r0, z0 };

KinVariable kin_variable_from_string(const std::string& name);
std::string to_string(KinVariable v);

struct EfficiencyTable {
  struct Row {
    double bin_low = 0.0;
    double bin_high = 0.0;
    std::string charge;  // "all", "+", "-", "same", "opposite"
    long matched = 0;
    long total = 0;
    std::optional<double> efficiency;   // absent for empty bins
    std::optional<double> uncertainty;  // sqrt(e (1 - e) / n)
  };
  std::string variable;
  std::vector<Row> rows;
};

/// Matched/total per kinematic bin over all events' primaries. Bin edges
/// must be strictly increasing; values outside the edges are dropped.
EfficiencyTable binned_efficiency(std::span<const Event> events,
                                  std::span<const Solution> solutions,
                                  KinVariable variable,
                                  std::span<const double> edges,
                                  bool charge_split);

struct DeltaRNearest {
  std::int64_t particle_id = 0;
  double delta_r = 0.0;
  bool same_charge = false;
};

/// Per primary, the nearest other primary in Delta R = sqrt(dphi^2 + deta^2)
/// with dphi wrapped into (-pi, pi]. Throws ValidationError with fewer than
/// two primaries.
std::vector<DeltaRNearest> delta_r_nearest(const Event& event);

/// Efficiency binned in Delta R to the nearest primary, split by whether
/// the neighbour has the same charge.
EfficiencyTable delta_r_efficiency(std::span<const Event> events,
                                   std::span<const Solution> solutions,
                                   std::span<const double> edges);

void write_efficiency_csv(std::ostream& out, const EfficiencyTable& table);

/// Evenly spaced bin edges.
std::vector<double> linear_edges(double lo, double hi, int n_bins);

}  // namespace trk
