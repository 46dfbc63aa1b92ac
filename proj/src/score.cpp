#include "trk/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include "trk/math.hpp"

namespace trk {

namespace {

struct TruthInfo {
  std::unordered_map<std::int64_t, const TruthLink*> by_hit;
  std::unordered_map<std::int64_t, const Particle*> particles;
  std::unordered_map<std::int64_t, int> hits_per_particle;

  TruthInfo(const Event& event, const Solution& solution) {
    if (!event.has_truth()) {
      throw ValidationError("scoring requires ground truth");
    }
    // entries are unique per hit, so size equality makes the mapping total
    if (solution.entries.size() != event.hits.size()) {
      throw ValidationError(
          "solution must assign every hit of the event exactly once (got " +
          std::to_string(solution.entries.size()) + " entries for " +
          std::to_string(event.hits.size()) + " hits)");
    }
    by_hit.reserve(event.truth.size());
    for (const TruthLink& t : event.truth) {
      by_hit.emplace(t.hit_id, &t);
      if (t.particle_id != 0) ++hits_per_particle[t.particle_id];
    }
    particles.reserve(event.particles.size());
    for (const Particle& p : event.particles) {
      particles.emplace(p.particle_id, &p);
    }
  }

  bool is_primary(std::int64_t pid) const {
    if (pid == 0) return false;
    auto it = particles.find(pid);
    return it != particles.end() && !it->second->is_secondary;
  }
};

}  // namespace

double accuracy_score(const Event& event, const Solution& solution,
                      const AccuracyOptions& opts) {
  const TruthInfo truth(event, solution);

  struct TrackTally {
    double total_weight = 0.0;
    std::map<std::int64_t, double> weight_by_pid;
    std::map<std::int64_t, int> count_by_pid;
  };
  std::map<std::int64_t, TrackTally> tracks;

  double denominator = 0.0;
  for (const Solution::Entry& e : solution.entries) {
    auto it = truth.by_hit.find(e.hit_id);
    if (it == truth.by_hit.end()) {
      throw ValidationError("solution references unknown hit " +
                            std::to_string(e.hit_id));
    }
    const TruthLink& link = *it->second;
    if (truth.is_primary(link.particle_id)) denominator += link.weight;
    if (e.track_id == 0) continue;
    TrackTally& tally = tracks[e.track_id];
    tally.total_weight += link.weight;
    tally.weight_by_pid[link.particle_id] += link.weight;
    tally.count_by_pid[link.particle_id] += 1;
  }
  if (denominator <= 0.0) return 0.0;

  double numerator = 0.0;
  for (const auto& [track_id, tally] : tracks) {
    std::int64_t majority_pid = 0;
    double majority_weight = -1.0;
    for (const auto& [pid, w] : tally.weight_by_pid) {
      if (w > majority_weight) {
        majority_weight = w;
        majority_pid = pid;
      }
    }
    if (majority_pid == 0) continue;
    if (!(majority_weight > 0.5 * tally.total_weight)) continue;
    if (!truth.is_primary(majority_pid)) continue;
    if (opts.double_majority) {
      const int in_track = tally.count_by_pid.at(majority_pid);
      const int of_particle = truth.hits_per_particle.at(majority_pid);
      if (!(2 * in_track > of_particle)) continue;
    }
    numerator += majority_weight;
  }
  return numerator / denominator;
}

double throughput_score(double accuracy, double seconds_per_event,
                        double t_max, double s_min) {
  if (seconds_per_event <= 0.0) {
    throw ValidationError("throughput_score: time must be positive");
  }
  if (accuracy <= s_min) return 0.0;
  return (accuracy - s_min) * std::sqrt(std::log1p(t_max / seconds_per_event));
}

EfficiencyResult particle_efficiency(const Event& event,
                                     const Solution& solution) {
  const TruthInfo truth(event, solution);

  // per particle, hit count per track id
  std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, int>>
      track_counts;
  for (const Solution::Entry& e : solution.entries) {
    auto it = truth.by_hit.find(e.hit_id);
    if (it == truth.by_hit.end()) {
      throw ValidationError("solution references unknown hit " +
                            std::to_string(e.hit_id));
    }
    const std::int64_t pid = it->second->particle_id;
    if (pid == 0 || e.track_id == 0) continue;
    ++track_counts[pid][e.track_id];
  }

  EfficiencyResult result;
  for (const Particle& p : event.particles) {
    if (p.is_secondary) continue;
    auto nit = truth.hits_per_particle.find(p.particle_id);
    if (nit == truth.hits_per_particle.end() || nit->second == 0) continue;
    ParticleMatch m;
    m.particle_id = p.particle_id;
    m.n_hits = nit->second;
    int best = 0;
    if (auto tit = track_counts.find(p.particle_id);
        tit != track_counts.end()) {
      for (const auto& [track, n] : tit->second) best = std::max(best, n);
    }
    m.matched = 2 * best > m.n_hits;
    result.n_matched += m.matched ? 1 : 0;
    ++result.n_primaries;
    result.particles.push_back(m);
  }
  result.efficiency =
      result.n_primaries > 0
          ? static_cast<double>(result.n_matched) / result.n_primaries
          : 0.0;
  return result;
}

KinVariable kin_variable_from_string(const std::string& name) {
  if (name == "log10_pt") return KinVariable::log10_pt;
  if (name == "phi") return KinVariable::phi;
  if (name == "eta") return KinVariable::eta;
  if (name == "r0") return KinVariable::r0;
  if (name == "z0") return KinVariable::z0;
  throw ValidationError("unknown kinematic variable '" + name + "'");
}

std::string to_string(KinVariable v) {
  switch (v) {
    case KinVariable::log10_pt: return "log10_pt";
    case KinVariable::phi: return "phi";
    case KinVariable::eta: return "eta";
    case KinVariable::r0: return "r0";
    case KinVariable::z0: return "z0";
  }
  return "?";
}

namespace {

double kin_value(KinVariable v, const Kinematics& k) {
  switch (v) {
    case KinVariable::log10_pt: return std::log10(k.pt);
    case KinVariable::phi: return k.phi;
    case KinVariable::eta: return k.eta;
    case KinVariable::r0: return k.r0;
    case KinVariable::z0: return k.z0;
  }
  return 0.0;
}

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw ValidationError("need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw ValidationError("bin edges must be strictly increasing");
    }
  }
}

int bin_of(std::span<const double> edges, double value) {
  if (value < edges.front() || value >= edges.back()) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<int>(it - edges.begin()) - 1;
}

struct BinCounter {
  std::vector<long> matched;
  std::vector<long> total;
  explicit BinCounter(std::size_t n) : matched(n, 0), total(n, 0) {}
  void add(int bin, bool is_matched) {
    if (bin < 0) return;
    ++total[bin];
    if (is_matched) ++matched[bin];
  }
};

void append_rows(EfficiencyTable& table, std::span<const double> edges,
                 const std::string& charge, const BinCounter& counts) {
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    EfficiencyTable::Row row;
    row.bin_low = edges[b];
    row.bin_high = edges[b + 1];
    row.charge = charge;
    row.matched = counts.matched[b];
    row.total = counts.total[b];
    if (row.total > 0) {
      const double e = static_cast<double>(row.matched) / row.total;
      row.efficiency = e;
      row.uncertainty = std::sqrt(e * (1.0 - e) / row.total);
    }
    table.rows.push_back(row);
  }
}

void check_paired(std::span<const Event> events,
                  std::span<const Solution> solutions) {
  if (events.size() != solutions.size()) {
    throw ValidationError("events and solutions must be paired");
  }
}

}  // namespace

EfficiencyTable binned_efficiency(std::span<const Event> events,
                                  std::span<const Solution> solutions,
                                  KinVariable variable,
                                  std::span<const double> edges,
                                  bool charge_split) {
  check_edges(edges);
  check_paired(events, solutions);

  const std::size_t n_bins = edges.size() - 1;
  std::vector<std::string> groups =
      charge_split ? std::vector<std::string>{"+", "-"}
                   : std::vector<std::string>{"all"};
  std::vector<BinCounter> counters(groups.size(), BinCounter(n_bins));

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& event = events[i];
    const EfficiencyResult eff = particle_efficiency(event, solutions[i]);
    std::unordered_map<std::int64_t, const Particle*> by_id;
    for (const Particle& p : event.particles) by_id.emplace(p.particle_id, &p);
    for (const ParticleMatch& m : eff.particles) {
      const Particle& p = *by_id.at(m.particle_id);
      const double value = kin_value(variable, kinematics(p));
      const std::size_t group = charge_split ? (p.q > 0 ? 0 : 1) : 0;
      counters[group].add(bin_of(edges, value), m.matched);
    }
  }

  EfficiencyTable table;
  table.variable = to_string(variable);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    append_rows(table, edges, groups[g], counters[g]);
  }
  return table;
}

std::vector<DeltaRNearest> delta_r_nearest(const Event& event) {
  struct Entry {
    std::int64_t pid;
    double phi, eta;
    int q;
  };
  std::vector<Entry> primaries;
  for (const Particle& p : event.particles) {
    if (p.is_secondary) continue;
    const Kinematics k = kinematics(p);
    primaries.push_back({p.particle_id, k.phi, k.eta, p.q});
  }
  if (primaries.size() < 2) {
    throw ValidationError("delta_r_nearest requires at least two primaries");
  }

  std::vector<DeltaRNearest> out;
  out.reserve(primaries.size());
  for (std::size_t i = 0; i < primaries.size(); ++i) {
    DeltaRNearest best;
    best.particle_id = primaries[i].pid;
    double best_dr = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < primaries.size(); ++j) {
      if (j == i) continue;
      const double dphi = wrap_pm_pi(primaries[j].phi - primaries[i].phi);
      const double deta = primaries[j].eta - primaries[i].eta;
      const double dr = std::sqrt(dphi * dphi + deta * deta);
      if (dr < best_dr) {
        best_dr = dr;
        best.same_charge = primaries[j].q == primaries[i].q;
      }
    }
    best.delta_r = best_dr;
    out.push_back(best);
  }
  return out;
}

EfficiencyTable delta_r_efficiency(std::span<const Event> events,
                                   std::span<const Solution> solutions,
                                   std::span<const double> edges) {
  check_edges(edges);
  check_paired(events, solutions);

  const std::size_t n_bins = edges.size() - 1;
  BinCounter same(n_bins), opposite(n_bins);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& event = events[i];
    const EfficiencyResult eff = particle_efficiency(event, solutions[i]);
    std::unordered_map<std::int64_t, bool> matched;
    for (const ParticleMatch& m : eff.particles) {
      matched.emplace(m.particle_id, m.matched);
    }
    for (const DeltaRNearest& d : delta_r_nearest(event)) {
      auto it = matched.find(d.particle_id);
      if (it == matched.end()) continue;  // primary without hits
      (d.same_charge ? same : opposite)
          .add(bin_of(edges, d.delta_r), it->second);
    }
  }

  EfficiencyTable table;
  table.variable = "delta_r";
  append_rows(table, edges, "same", same);
  append_rows(table, edges, "opposite", opposite);
  return table;
}

void write_efficiency_csv(std::ostream& out, const EfficiencyTable& table) {
  out << "variable,bin_low,bin_high,charge,matched,total,efficiency,"
         "uncertainty\n";
  for (const auto& row : table.rows) {
    out << table.variable << ',' << row.bin_low << ',' << row.bin_high << ','
        << row.charge << ',' << row.matched << ',' << row.total << ',';
    if (row.efficiency) out << *row.efficiency;
    out << ',';
    if (row.uncertainty) out << *row.uncertainty;
    out << '\n';
  }
}

std::vector<double> linear_edges(double lo, double hi, int n_bins) {
  if (n_bins < 1 || !(hi > lo)) {
    throw ValidationError("linear_edges: need hi > lo and n_bins >= 1");
  }
  std::vector<double> edges(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i) {
    edges[i] = lo + (hi - lo) * i / n_bins;
  }
  return edges;
}

}  // namespace trk
