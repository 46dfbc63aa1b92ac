#include "trk/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "csv_util.hpp"

namespace trk {

namespace fs = std::filesystem;

fs::path event_file(const fs::path& directory, std::int64_t event_id,
                    const std::string& suffix) {
  char name[64];
  std::snprintf(name, sizeof(name), "event%09lld-%s.csv",
                static_cast<long long>(event_id), suffix.c_str());
  return directory / name;
}

namespace {

std::vector<Hit> load_hits(const fs::path& file) {
  detail::CsvReader reader(file);
  reader.expect_header("hit_id,x,y,z,volume_id,layer_id,module_id");
  std::vector<Hit> hits;
  std::vector<std::string_view> f;
  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 7) reader.fail("expected 7 fields");
    Hit h;
    h.hit_id = reader.parse_int(f[0]);
    h.x = reader.parse_double(f[1]);
    h.y = reader.parse_double(f[2]);
    h.z = reader.parse_double(f[3]);
    h.volume_id = static_cast<int>(reader.parse_int(f[4]));
    h.layer_id = static_cast<int>(reader.parse_int(f[5]));
    h.module_id = static_cast<int>(reader.parse_int(f[6]));
    hits.push_back(h);
  }
  return hits;
}

std::vector<TruthLink> load_truth(const fs::path& file) {
  detail::CsvReader reader(file);
  reader.expect_header("hit_id,particle_id,weight");
  std::vector<TruthLink> truth;
  std::vector<std::string_view> f;
  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 3) reader.fail("expected 3 fields");
    truth.push_back({reader.parse_int(f[0]), reader.parse_int(f[1]),
                     reader.parse_double(f[2])});
  }
  return truth;
}

std::vector<Particle> load_particles(const fs::path& file,
                                     const IngestOptions& opts) {
  detail::CsvReader reader(file);
  std::vector<Particle> particles;
  std::vector<std::string_view> f;

  // Header with or without the trailing is_secondary column; without it the
  // flag is inferred from the vertex position.
  if (!reader.next_row(f)) reader.fail("missing header");
  bool has_flag;
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) header += ',';
    header += std::string(f[i]);
  }
  if (header == "particle_id,vx,vy,vz,px,py,pz,q,is_secondary") {
    has_flag = true;
  } else if (header == "particle_id,vx,vy,vz,px,py,pz,q") {
    has_flag = false;
  } else {
    reader.fail("unexpected particles header '" + header + "'");
  }

  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != (has_flag ? 9u : 8u)) reader.fail("wrong field count");
    Particle p;
    p.particle_id = reader.parse_int(f[0]);
    p.vx = reader.parse_double(f[1]);
    p.vy = reader.parse_double(f[2]);
    p.vz = reader.parse_double(f[3]);
    p.px = reader.parse_double(f[4]);
    p.py = reader.parse_double(f[5]);
    p.pz = reader.parse_double(f[6]);
    p.q = static_cast<int>(reader.parse_int(f[7]));
    if (has_flag) {
      p.is_secondary = reader.parse_int(f[8]) != 0;
    } else {
      const double r0 = std::hypot(p.vx, p.vy);
      p.is_secondary =
          r0 > opts.secondary_r0_mm || std::abs(p.vz) > opts.secondary_abs_z0_mm;
    }
    particles.push_back(p);
  }
  return particles;
}

}  // namespace

Event load_event(const fs::path& directory, std::int64_t event_id,
                 bool with_truth, const IngestOptions& opts) {
  Event event;
  event.event_id = event_id;
  event.hits = load_hits(event_file(directory, event_id, "hits"));
  if (with_truth) {
    const fs::path truth_file = event_file(directory, event_id, "truth");
    const fs::path particles_file = event_file(directory, event_id, "particles");
    if (fs::exists(truth_file)) event.truth = load_truth(truth_file);
    if (fs::exists(particles_file)) {
      event.particles = load_particles(particles_file, opts);
    }
  }
  validate_event(event);
  return event;
}

void write_event(const Event& event, const fs::path& directory) {
  fs::create_directories(directory);
  {
    auto out = detail::open_output(event_file(directory, event.event_id, "hits"));
    out << "hit_id,x,y,z,volume_id,layer_id,module_id\n";
    for (const Hit& h : event.hits) {
      out << h.hit_id << ',' << detail::format_double(h.x) << ','
          << detail::format_double(h.y) << ',' << detail::format_double(h.z)
          << ',' << h.volume_id << ',' << h.layer_id << ',' << h.module_id
          << '\n';
    }
  }
  if (!event.truth.empty()) {
    auto out = detail::open_output(event_file(directory, event.event_id, "truth"));
    out << "hit_id,particle_id,weight\n";
    for (const TruthLink& t : event.truth) {
      out << t.hit_id << ',' << t.particle_id << ','
          << detail::format_double(t.weight) << '\n';
    }
  }
  if (!event.particles.empty()) {
    auto out =
        detail::open_output(event_file(directory, event.event_id, "particles"));
    out << "particle_id,vx,vy,vz,px,py,pz,q,is_secondary\n";
    for (const Particle& p : event.particles) {
      out << p.particle_id << ',' << detail::format_double(p.vx) << ','
          << detail::format_double(p.vy) << ',' << detail::format_double(p.vz)
          << ',' << detail::format_double(p.px) << ','
          << detail::format_double(p.py) << ',' << detail::format_double(p.pz)
          << ',' << p.q << ',' << (p.is_secondary ? 1 : 0) << '\n';
    }
  }
}

std::vector<std::int64_t> list_event_ids(const fs::path& directory) {
  std::vector<std::int64_t> ids;
  if (!fs::is_directory(directory)) {
    throw IoError("not a directory: " + directory.string());
  }
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    // event<NNNNNNNNN>-hits.csv
    if (name.size() == 23 && name.starts_with("event") &&
        name.ends_with("-hits.csv")) {
      ids.push_back(std::strtoll(name.c_str() + 5, nullptr, 10));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void write_solution(const Solution& solution, const fs::path& file) {
  Solution canon = solution;
  canon.canonicalize();
  auto out = detail::open_output(file);
  out << "event_id,hit_id,track_id\n";
  for (const Solution::Entry& e : canon.entries) {
    out << canon.event_id << ',' << e.hit_id << ',' << e.track_id << '\n';
  }
}

Solution read_solution(const fs::path& file) {
  detail::CsvReader reader(file);
  reader.expect_header("event_id,hit_id,track_id");
  Solution solution;
  bool first = true;
  std::vector<std::string_view> f;
  while (reader.next_row(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 3) reader.fail("expected 3 fields");
    const std::int64_t event_id = reader.parse_int(f[0]);
    if (first) {
      solution.event_id = event_id;
      first = false;
    } else if (event_id != solution.event_id) {
      reader.fail("mixed event ids in solution file");
    }
    solution.entries.push_back({reader.parse_int(f[1]), reader.parse_int(f[2])});
  }
  solution.canonicalize();
  return solution;
}

}  // namespace trk
