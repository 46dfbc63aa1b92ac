#pragma once

#include <span>

#include "trk/geometry.hpp"
#include "trk/types.hpp"

namespace trk {

/// Estimates the per-layer Bz(t) polynomial from ground truth: circles
/// through consecutive hit triplets of each particle give a local field
/// sample Bz = pT / (0.0003 R) at the middle hit, and a least-squares
/// polynomial of the given degree is fitted per layer. All three variants
/// get the same coefficients. Layers without samples fall back to
/// default_bz.
FieldMap fit_layer_fields(std::span<const Event> events,
                          const Detector& detector, int degree = 2,
                          double default_bz = 2.0);

}  // namespace trk
