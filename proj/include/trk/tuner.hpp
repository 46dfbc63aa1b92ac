#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trk/finder.hpp"

namespace trk {

/// Per-pass optimization criterion weights: matched tracks found by the
/// pass against wrongly assigned hits.
struct TuneWeights {
  double w_found = 1.0;
  double w_wrong = 2.0;
};

struct TuneOptions {
  int max_iters = 50;        // full sweeps over the parameters
  double initial_step = 0.25;  // relative step of the multiplicative moves
  double min_step = 1e-3;      // stop when the relative step shrinks below
};

struct HillClimbResult {
  std::vector<double> params;
  double value = 0.0;
  int iterations = 0;
  std::vector<double> accepted_values;  // value after every accepted move
};

/// Coordinate-wise hill climb with multiplicative steps: per sweep, each
/// parameter is pushed by factors (1 +- step) as long as the objective
/// improves; a sweep without improvement halves the step. Deterministic.
HillClimbResult hill_climb(
    std::vector<double> params,
    const std::function<double(std::span<const double>)>& objective,
    const TuneOptions& options = {});

/// The tunable scalar parameters of a pass, as (name, pointer) pairs.
std::vector<std::pair<std::string, double*>> tunable_parameters(
    PassConfig& pass);

/// w_found * (tracks matched to a particle) - w_wrong * (hits assigned to
/// the wrong track), for a single pass run standalone over the events.
double pass_criterion(const PassConfig& pass, std::span<const Event> events,
                      const Detector& detector, const FieldMap& field,
                      const TuneWeights& weights);

struct TuneResult {
  PassConfig config;
  double criterion = 0.0;
  int iterations = 0;
  std::vector<double> accepted_values;
};

/// Tunes every continuous window/cut parameter of the pass against
/// pass_criterion on the training events.
TuneResult tune_pass(const PassConfig& pass, std::span<const Event> events,
                     const Detector& detector, const FieldMap& field,
                     const TuneWeights& weights = {},
                     const TuneOptions& options = {});

}  // namespace trk
