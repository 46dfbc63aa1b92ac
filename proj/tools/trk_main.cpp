#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trk/bench.hpp"
#include "trk/csv.hpp"
#include "trk/field_calib.hpp"
#include "trk/finder.hpp"
#include "trk/schedule.hpp"
#include "trk/score.hpp"
#include "trk/synth.hpp"
#include "trk/tuner.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonConfig {
  std::string geometry_file;  // empty -> built-in default detector
  std::string field_file;     // empty -> uniform 2 T
  std::string schedule_file;  // empty -> built-in default schedule
};

void add_common(CLI::App* cmd, CommonConfig& cfg, bool with_schedule) {
  cmd->add_option("--geometry", cfg.geometry_file,
                  "Detector geometry CSV (default: built-in layout)")
      ->envname("TRK_GEOMETRY");
  cmd->add_option("--field", cfg.field_file,
                  "Per-layer field polynomial CSV (default: uniform 2 T)");
  if (with_schedule) {
    cmd->add_option("--schedule", cfg.schedule_file,
                    "Reconstruction schedule file (default: built-in 12-pass)")
        ->envname("TRK_SCHEDULE");
  }
}

trk::Detector make_detector(const CommonConfig& cfg) {
  if (cfg.geometry_file.empty()) return trk::Detector::make_default();
  return trk::Detector::load_csv(cfg.geometry_file);
}

trk::FieldMap make_field(const CommonConfig& cfg, const trk::Detector& det) {
  if (cfg.field_file.empty()) return trk::FieldMap::uniform(det, 2.0);
  return trk::FieldMap::load_csv(cfg.field_file);
}

trk::Schedule make_schedule(const CommonConfig& cfg, const trk::Detector& det) {
  if (cfg.schedule_file.empty()) return trk::make_default_schedule(det);
  trk::Schedule s = trk::load_schedule(cfg.schedule_file);
  s.validate(det);
  return s;
}

void audit(const CommonConfig& cfg, bool with_schedule) {
  std::cerr << "[trk] geometry: "
            << (cfg.geometry_file.empty() ? "built-in default"
                                          : cfg.geometry_file)
            << "\n[trk] field: "
            << (cfg.field_file.empty() ? "uniform 2 T" : cfg.field_file)
            << '\n';
  if (with_schedule) {
    std::cerr << "[trk] schedule: "
              << (cfg.schedule_file.empty() ? "built-in default (12 passes)"
                                            : cfg.schedule_file)
              << '\n';
  }
}

std::vector<trk::Event> load_events(const std::string& dir, bool with_truth) {
  std::vector<trk::Event> events;
  for (std::int64_t id : trk::list_event_ids(dir)) {
    events.push_back(trk::load_event(dir, id, with_truth));
  }
  if (events.empty()) {
    throw trk::IoError("no event files found in " + dir);
  }
  return events;
}

void write_json(const ordered_json& j, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_file);
  if (!out) throw trk::IoError("cannot write " + out_file);
  out << j.dump(2) << '\n';
}

ordered_json report_to_json(const trk::ScoreReport& r) {
  ordered_json j;
  j["valid"] = r.valid;
  if (!r.error.empty()) j["error"] = r.error;
  j["n_events"] = r.n_events;
  j["accuracy"] = r.accuracy;
  j["per_event_accuracy"] = r.per_event_accuracy;
  if (r.mean_time_sec) {
    j["mean_time_sec"] = *r.mean_time_sec;
    j["per_repetition_time_sec"] = r.per_repetition_time_sec;
    j["time_spread_rel"] = r.time_spread_rel;
  }
  if (r.throughput) j["throughput_score"] = *r.throughput;
  return j;
}

// ---- subcommand bodies ----------------------------------------------------

int run_generate(const CommonConfig& common, const trk::GenConfig& base,
                 int n_events, std::int64_t first_id, bool noiseless,
                 const std::string& out_dir) {
  audit(common, false);
  const trk::Detector detector = make_detector(common);
  const trk::GenConfig cfg = noiseless ? base.noiseless() : base;
  for (int i = 0; i < n_events; ++i) {
    const trk::Event event =
        trk::generate_event(cfg, first_id + i, detector);
    trk::write_event(event, out_dir);
  }
  std::cerr << "[trk] wrote " << n_events << " events to " << out_dir << '\n';
  return 0;
}

int run_reconstruct(const CommonConfig& common, const std::string& in_dir,
                    const std::string& out_dir, int workers) {
  audit(common, true);
  const trk::Detector detector = make_detector(common);
  const trk::FieldMap field = make_field(common, detector);
  const trk::Schedule schedule = make_schedule(common, detector);
  const trk::MikadoFinder finder(detector, field);

  std::filesystem::create_directories(out_dir);
  trk::FinderOptions options;
  options.workers = workers;
  int n = 0;
  for (std::int64_t id : trk::list_event_ids(in_dir)) {
    const trk::Event event = trk::load_event(in_dir, id, /*with_truth=*/false);
    const trk::Solution solution = finder.run(event, schedule, options);
    trk::write_solution(solution, trk::event_file(out_dir, id, "solution"));
    ++n;
  }
  std::cerr << "[trk] reconstructed " << n << " events -> " << out_dir << '\n';
  return 0;
}

int run_score(const std::string& in_dir, const std::string& solutions_dir,
              std::optional<double> time_override, bool double_majority,
              const std::string& out_file) {
  trk::ScoreReport report;
  trk::AccuracyOptions opts;
  opts.double_majority = double_majority;
  double sum = 0.0;
  for (std::int64_t id : trk::list_event_ids(in_dir)) {
    const trk::Event event = trk::load_event(in_dir, id, /*with_truth=*/true);
    const trk::Solution solution =
        trk::read_solution(trk::event_file(solutions_dir, id, "solution"));
    const double a = trk::accuracy_score(event, solution, opts);
    report.per_event_accuracy.push_back(a);
    sum += a;
    ++report.n_events;
  }
  if (report.n_events == 0) throw trk::IoError("no events in " + in_dir);
  report.accuracy = sum / report.n_events;
  if (time_override) {
    report.mean_time_sec = *time_override;
    report.throughput =
        *time_override >= 600.0
            ? 0.0
            : trk::throughput_score(report.accuracy, *time_override);
  }
  write_json(report_to_json(report), out_file);
  return 0;
}

int run_analyze(const std::string& in_dir, const std::string& solutions_dir,
                const std::string& out_dir, int n_bins) {
  std::vector<trk::Event> events = load_events(in_dir, true);
  std::vector<trk::Solution> solutions;
  for (const trk::Event& e : events) {
    solutions.push_back(trk::read_solution(
        trk::event_file(solutions_dir, e.event_id, "solution")));
  }

  std::filesystem::create_directories(out_dir);
  struct Spec {
    trk::KinVariable var;
    double lo, hi;
  };
  const Spec specs[] = {
      {trk::KinVariable::log10_pt, -1.0, 1.0},
      {trk::KinVariable::phi, -3.15, 3.15},
      {trk::KinVariable::eta, -3.0, 3.0},
      {trk::KinVariable::r0, 0.0, 5.0},
      {trk::KinVariable::z0, -180.0, 180.0},
  };
  for (const Spec& s : specs) {
    const auto edges = trk::linear_edges(s.lo, s.hi, n_bins);
    const auto table = trk::binned_efficiency(events, solutions, s.var, edges,
                                              /*charge_split=*/true);
    const std::string path =
        out_dir + "/efficiency_" + trk::to_string(s.var) + ".csv";
    std::ofstream out(path);
    if (!out) throw trk::IoError("cannot write " + path);
    trk::write_efficiency_csv(out, table);
  }
  {
    const auto edges = trk::linear_edges(0.0, 0.05, n_bins);
    const auto table = trk::delta_r_efficiency(events, solutions, edges);
    const std::string path = out_dir + "/efficiency_delta_r.csv";
    std::ofstream out(path);
    if (!out) throw trk::IoError("cannot write " + path);
    trk::write_efficiency_csv(out, table);
  }
  std::cerr << "[trk] analysis tables written to " << out_dir << '\n';
  return 0;
}

int run_bench(const CommonConfig& common, const std::string& in_dir,
              int repetitions, int workers, const std::string& out_file) {
  audit(common, true);
  const trk::Detector detector = make_detector(common);
  const trk::FieldMap field = make_field(common, detector);
  const trk::Schedule schedule = make_schedule(common, detector);
  const trk::MikadoFinder finder(detector, field);

  // everything in memory before any clock starts
  const std::vector<trk::Event> events = load_events(in_dir, true);

  trk::FinderOptions options;
  options.workers = workers;
  const trk::ScoreReport report = trk::bench(
      events,
      [&](const trk::Event& e) { return finder.run(e, schedule, options); },
      repetitions);
  ordered_json j = report_to_json(report);
  j["workers"] = workers;
  j["repetitions"] = repetitions;
  write_json(j, out_file);
  return report.valid ? 0 : 1;
}

int run_tune(const CommonConfig& common, const std::string& in_dir,
             const std::string& out_file, int pass_index, double w_found,
             double w_wrong, int max_iters) {
  audit(common, true);
  const trk::Detector detector = make_detector(common);
  const trk::FieldMap field = make_field(common, detector);
  trk::Schedule schedule = make_schedule(common, detector);

  const std::vector<trk::Event> events = load_events(in_dir, true);

  trk::TuneWeights weights{w_found, w_wrong};
  trk::TuneOptions options;
  options.max_iters = max_iters;

  const auto tune_one = [&](int index) {
    const trk::TuneResult result = trk::tune_pass(
        schedule.passes[index], events, detector, field, weights, options);
    std::cerr << "[trk] pass " << index << " ('"
              << schedule.passes[index].name << "') criterion "
              << (result.accepted_values.empty()
                      ? 0.0
                      : result.accepted_values.front())
              << " -> " << result.criterion << " in " << result.iterations
              << " sweeps\n";
    schedule.passes[index] = result.config;
  };

  if (pass_index >= 0) {
    if (pass_index >= static_cast<int>(schedule.passes.size())) {
      throw trk::ValidationError("pass index out of range");
    }
    tune_one(pass_index);
  } else {
    for (std::size_t i = 0; i < schedule.passes.size(); ++i) {
      tune_one(static_cast<int>(i));
    }
  }
  trk::save_schedule(schedule, out_file);
  std::cerr << "[trk] tuned schedule written to " << out_file << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale particle track reconstruction and evaluation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write synthetic events");
  CommonConfig gen_common;
  add_common(gen, gen_common, false);
  trk::GenConfig gen_cfg;
  int gen_events = 1;
  std::int64_t gen_first = 0;
  bool gen_noiseless = false;
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--events", gen_events, "Number of events (default 1)");
  gen->add_option("--first-event", gen_first, "First event id (default 0)");
  gen->add_option("--tracks", gen_cfg.n_primaries,
                  "Primary particles per event (default 100)");
  gen->add_option("--seed", gen_cfg.rng_seed, "RNG seed (default 1)");
  gen->add_option("--pt-min", gen_cfg.pt_min, "Minimum pT in GeV");
  gen->add_option("--pt-max", gen_cfg.pt_max, "Maximum pT in GeV");
  gen->add_option("--eta-min", gen_cfg.eta_min, "Minimum pseudorapidity");
  gen->add_option("--eta-max", gen_cfg.eta_max, "Maximum pseudorapidity");
  gen->add_option("--beamspot-sigma-z", gen_cfg.beamspot_sigma_z,
                  "Beamspot z sigma in mm (default 55)");
  gen->add_option("--noise-fraction", gen_cfg.noise_fraction,
                  "Noise share of all hits (default 0.05)");
  gen->add_option("--duplicate-prob", gen_cfg.duplicate_prob,
                  "Module-overlap duplicate probability (default 0.1)");
  gen->add_option("--hole-prob", gen_cfg.hole_prob,
                  "Probability a crossing yields no hit (default 0.02)");
  gen->add_option("--secondary-fraction", gen_cfg.secondary_fraction,
                  "Secondaries per primary (default 0.05)");
  gen->add_flag("--noiseless", gen_noiseless,
                "Disable smearing, noise and holes");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Run the track finder");
  CommonConfig rec_common;
  add_common(rec, rec_common, true);
  std::string rec_in, rec_out;
  int rec_workers = 2;
  rec->add_option("--in", rec_in, "Event directory")->required();
  rec->add_option("--out", rec_out, "Solution output directory")->required();
  rec->add_option("--workers", rec_workers, "Worker threads (default 2)");

  // score
  auto* sco = app.add_subcommand("score", "Score solutions against truth");
  std::string sco_in, sco_solutions, sco_out;
  bool sco_double = false;
  std::optional<double> sco_time;
  double sco_time_value = 0.0;
  sco->add_option("--in", sco_in, "Event directory (with truth)")->required();
  sco->add_option("--solutions", sco_solutions, "Solution directory")
      ->required();
  auto* time_opt = sco->add_option(
      "--time", sco_time_value,
      "Seconds/event override for the combined accuracy-speed score");
  sco->add_flag("--double-majority", sco_double,
                "Require the track to also hold >50% of the particle's hits");
  sco->add_option("--out", sco_out, "Write the JSON report here (default stdout)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Efficiency tables and Delta R");
  std::string ana_in, ana_solutions, ana_out;
  int ana_bins = 20;
  ana->add_option("--in", ana_in, "Event directory (with truth)")->required();
  ana->add_option("--solutions", ana_solutions, "Solution directory")
      ->required();
  ana->add_option("--out", ana_out, "Output directory for CSV tables")
      ->required();
  ana->add_option("--bins", ana_bins, "Bins per variable (default 20)");

  // bench
  auto* ben = app.add_subcommand("bench", "Timed in-memory reconstruction");
  CommonConfig ben_common;
  add_common(ben, ben_common, true);
  std::string ben_in, ben_out;
  int ben_reps = 1, ben_workers = 2;
  ben->add_option("--in", ben_in, "Event directory (with truth)")->required();
  ben->add_option("--repetitions", ben_reps, "Timing repetitions (default 1)");
  ben->add_option("--workers", ben_workers, "Worker threads (default 2)");
  ben->add_option("--out", ben_out, "Write the JSON report here (default stdout)");

  // tune
  auto* tun = app.add_subcommand("tune", "Hill-climb pass parameters");
  CommonConfig tun_common;
  add_common(tun, tun_common, true);
  std::string tun_in, tun_out;
  int tun_pass = -1, tun_iters = 50;
  double tun_w_found = 1.0, tun_w_wrong = 2.0;
  tun->add_option("--in", tun_in, "Training event directory (with truth)")
      ->required();
  tun->add_option("--out", tun_out, "Tuned schedule output file")->required();
  tun->add_option("--pass", tun_pass, "Pass index to tune (default: all)");
  tun->add_option("--w-found", tun_w_found, "Weight of matched tracks");
  tun->add_option("--w-wrong", tun_w_wrong, "Weight of wrongly assigned hits");
  tun->add_option("--max-iters", tun_iters, "Maximum sweeps (default 50)");

  // schedule
  auto* sch = app.add_subcommand("schedule", "Write the built-in schedule");
  CommonConfig sch_common;
  add_common(sch, sch_common, false);
  std::string sch_out;
  sch->add_option("--out", sch_out, "Schedule output file")->required();

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      return run_generate(gen_common, gen_cfg, gen_events, gen_first,
                          gen_noiseless, gen_out);
    }
    if (rec->parsed()) {
      return run_reconstruct(rec_common, rec_in, rec_out, rec_workers);
    }
    if (sco->parsed()) {
      if (time_opt->count() > 0) sco_time = sco_time_value;
      return run_score(sco_in, sco_solutions, sco_time, sco_double, sco_out);
    }
    if (ana->parsed()) {
      return run_analyze(ana_in, ana_solutions, ana_out, ana_bins);
    }
    if (ben->parsed()) {
      return run_bench(ben_common, ben_in, ben_reps, ben_workers, ben_out);
    }
    if (tun->parsed()) {
      return run_tune(tun_common, tun_in, tun_out, tun_pass, tun_w_found,
                      tun_w_wrong, tun_iters);
    }
    if (sch->parsed()) {
      const trk::Detector detector = make_detector(sch_common);
      trk::save_schedule(trk::make_default_schedule(detector), sch_out);
      std::cerr << "[trk] schedule written to " << sch_out << '\n';
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const trk::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const trk::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
