#pragma once

#include <filesystem>

#include "trk/finder.hpp"

namespace trk {

/// Built-in 12-pass schedule for the default detector: three seeding
/// configurations (pixel triplet, mid-detector triplet for tracks missing
/// the innermost hit, origin-constrained pixel doublet) at four cut
/// tightness levels, ordered tight to loose.
Schedule make_default_schedule(const Detector& detector);

/// One [[pass]] table per pass; keys match the PassConfig fields, with one
/// `window <volume>:<layer> = dphi dt` line per detector layer.
Schedule load_schedule(const std::filesystem::path& file);
void save_schedule(const Schedule& schedule, const std::filesystem::path& file);

}  // namespace trk
