#pragma once

#include <filesystem>
#include <vector>

#include "trk/types.hpp"

namespace trk {

/// Options for ingesting events that lack an is_secondary column: a
/// particle is flagged secondary when its vertex falls outside these
/// bounds.
struct IngestOptions {
  double secondary_r0_mm = 5.0;
  double secondary_abs_z0_mm = 300.0;
};

/// File name `event<NNNNNNNNN>-<suffix>.csv` with the 9-digit zero-padded id.
std::filesystem::path event_file(const std::filesystem::path& directory,
                                 std::int64_t event_id,
                                 const std::string& suffix);

/// Loads one event from its per-event CSV files. Truth and particle files
/// are optional when with_truth is false or the files are absent. The
/// loaded event is validated.
Event load_event(const std::filesystem::path& directory, std::int64_t event_id,
                 bool with_truth = true, const IngestOptions& opts = {});

/// Writes hits plus, when present, truth and particles.
void write_event(const Event& event, const std::filesystem::path& directory);

/// Event ids present in a directory, sorted ascending.
std::vector<std::int64_t> list_event_ids(const std::filesystem::path& directory);

void write_solution(const Solution& solution, const std::filesystem::path& file);
Solution read_solution(const std::filesystem::path& file);

}  // namespace trk
