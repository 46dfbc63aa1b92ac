#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "trk/csv.hpp"
#include "trk/math.hpp"
#include "trk/synth.hpp"
#include "trk/types.hpp"

namespace fs = std::filesystem;
using namespace trk;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("trk_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("kinematics of a transverse particle") {
  Particle p;
  p.particle_id = 1;
  p.px = 1.0;
  const Kinematics k = kinematics(p);
  CHECK(k.pt == doctest::Approx(1.0));
  CHECK(k.phi == doctest::Approx(0.0));
  CHECK(k.eta == doctest::Approx(0.0));
  CHECK(k.r0 == doctest::Approx(0.0));
  CHECK(k.z0 == doctest::Approx(0.0));
}

TEST_CASE("kinematics eta matches -ln tan(theta/2)") {
  Particle p;
  p.particle_id = 1;
  p.py = 1.0;
  p.pz = 1.0;  // theta = pi/4
  const Kinematics k = kinematics(p);
  CHECK(k.pt == doctest::Approx(1.0));
  CHECK(k.phi == doctest::Approx(kPi / 2));
  CHECK(k.eta == doctest::Approx(-std::log(std::tan(kPi / 8))));
  CHECK(k.eta == doctest::Approx(0.881373587));
}

TEST_CASE("kinematics at the phi = -pi boundary") {
  Particle p;
  p.particle_id = 1;
  p.px = -1.0;
  p.py = -1e-12;
  const Kinematics k = kinematics(p);
  CHECK(k.phi <= kPi);
  CHECK(k.phi > -kPi - 1e-9);
  CHECK(std::abs(k.phi) == doctest::Approx(kPi));
}

TEST_CASE("kinematics rejects zero momentum") {
  Particle p;
  p.particle_id = 1;
  CHECK_THROWS_AS(kinematics(p), ValidationError);
}

TEST_CASE("kinematics symmetry properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Particle p;
    p.particle_id = 1;
    p.px = u(rng);
    p.py = u(rng);
    p.pz = u(rng);
    if (std::hypot(p.px, p.py) < 1e-6) continue;

    Particle mirrored = p;
    mirrored.pz = -p.pz;
    CHECK(kinematics(p).eta == doctest::Approx(-kinematics(mirrored).eta));

    const double alpha = u(rng) * kPi;
    Particle rotated = p;
    rotated.px = p.px * std::cos(alpha) - p.py * std::sin(alpha);
    rotated.py = p.px * std::sin(alpha) + p.py * std::cos(alpha);
    const double dphi = wrap_pm_pi(kinematics(rotated).phi - kinematics(p).phi);
    CHECK(dphi == doctest::Approx(wrap_pm_pi(alpha)).epsilon(1e-9));
  }
}

TEST_CASE("load_event reads a minimal hits file") {
  const fs::path dir = temp_dir("load_min");
  {
    std::ofstream out(dir / "event000000003-hits.csv");
    out << "hit_id,x,y,z,volume_id,layer_id,module_id\n"
        << "1,32.0,0.0,10.0,8,2,1\n"
        << "2,0.0,72.0,20.0,8,4,1\n"
        << "3,-116.0,0.0,30.0,8,6,1\n";
  }
  const Event event = load_event(dir, 3, true);
  CHECK(event.event_id == 3);
  CHECK(event.hits.size() == 3);
  CHECK(event.truth.empty());
  CHECK(event.hits[1].y == doctest::Approx(72.0));
}

TEST_CASE("load_event picks up truth when present") {
  const fs::path dir = temp_dir("load_truth");
  {
    std::ofstream out(dir / "event000000001-hits.csv");
    out << "hit_id,x,y,z,volume_id,layer_id,module_id\n"
        << "1,1,0,0,8,2,1\n2,2,0,0,8,4,1\n3,3,0,0,8,6,1\n";
  }
  {
    std::ofstream out(dir / "event000000001-truth.csv");
    out << "hit_id,particle_id,weight\n1,7,1\n2,7,1\n3,7,1\n";
  }
  {
    std::ofstream out(dir / "event000000001-particles.csv");
    out << "particle_id,vx,vy,vz,px,py,pz,q,is_secondary\n"
        << "7,0,0,0,1,0,0,1,0\n";
  }
  const Event event = load_event(dir, 1, true);
  CHECK(event.truth.size() == 3);
  for (const TruthLink& t : event.truth) CHECK(t.particle_id == 7);
  CHECK(event.particles.size() == 1);
  CHECK_FALSE(event.particles[0].is_secondary);

  const Event no_truth = load_event(dir, 1, false);
  CHECK(no_truth.truth.empty());
}

TEST_CASE("load_event reports malformed and duplicate input") {
  const fs::path dir = temp_dir("load_bad");
  {
    std::ofstream out(dir / "event000000001-hits.csv");
    out << "hit_id,x,y,z,volume_id,layer_id,module_id\n"
        << "1,1,0,zzz,8,2,1\n";
  }
  CHECK_THROWS_WITH_AS(load_event(dir, 1, false),
                       doctest::Contains("event000000001-hits.csv:2"),
                       ValidationError);
  CHECK_THROWS_AS(load_event(dir, 99, false), IoError);

  {
    std::ofstream out(dir / "event000000002-hits.csv");
    out << "hit_id,x,y,z,volume_id,layer_id,module_id\n"
        << "1,1,0,0,8,2,1\n1,2,0,0,8,4,1\n";
  }
  CHECK_THROWS_AS(load_event(dir, 2, false), ValidationError);
}

TEST_CASE("validation rejects a hit with zero or two truth links") {
  Event event;
  event.event_id = 1;
  event.hits = {{1, 1, 0, 0, 8, 2, 1}, {2, 2, 0, 0, 8, 4, 1}};
  event.particles = {{5, 0, 0, 0, 1, 0, 0, 1, false}};

  event.truth = {{1, 5, 1.0}};  // hit 2 unlinked
  CHECK_THROWS_AS(validate_event(event), ValidationError);

  event.truth = {{1, 5, 1.0}, {2, 5, 1.0}, {2, 5, 1.0}};  // hit 2 twice
  CHECK_THROWS_AS(validate_event(event), ValidationError);

  event.truth = {{1, 5, 1.0}, {2, 5, 1.0}};
  CHECK_NOTHROW(validate_event(event));
}

TEST_CASE("generated events round-trip through the CSV files") {
  const Detector detector = Detector::make_default();
  std::mt19937_64 seed_rng(2718);
  for (int trial = 0; trial < 4; ++trial) {
    GenConfig cfg;
    cfg.n_primaries = 25;
    cfg.rng_seed = seed_rng();
    const std::int64_t event_id = trial * 3;
    const Event event = generate_event(cfg, event_id, detector);
    const fs::path dir = temp_dir("roundtrip_" + std::to_string(trial));
    write_event(event, dir);
    const Event back = load_event(dir, event_id, true);

    REQUIRE(back.hits.size() == event.hits.size());
    REQUIRE(back.truth.size() == event.truth.size());
    REQUIRE(back.particles.size() == event.particles.size());
    for (std::size_t i = 0; i < event.hits.size(); ++i) {
      CHECK(back.hits[i].hit_id == event.hits[i].hit_id);
      CHECK(back.hits[i].x == event.hits[i].x);  // exact, not approximate
      CHECK(back.hits[i].y == event.hits[i].y);
      CHECK(back.hits[i].z == event.hits[i].z);
      CHECK(back.hits[i].volume_id == event.hits[i].volume_id);
      CHECK(back.hits[i].layer_id == event.hits[i].layer_id);
      CHECK(back.hits[i].module_id == event.hits[i].module_id);
    }
    for (std::size_t i = 0; i < event.truth.size(); ++i) {
      CHECK(back.truth[i].hit_id == event.truth[i].hit_id);
      CHECK(back.truth[i].particle_id == event.truth[i].particle_id);
      CHECK(back.truth[i].weight == event.truth[i].weight);
    }
    for (std::size_t i = 0; i < event.particles.size(); ++i) {
      CHECK(back.particles[i].particle_id == event.particles[i].particle_id);
      CHECK(back.particles[i].px == event.particles[i].px);
      CHECK(back.particles[i].vz == event.particles[i].vz);
      CHECK(back.particles[i].q == event.particles[i].q);
      CHECK(back.particles[i].is_secondary == event.particles[i].is_secondary);
    }
  }
}

TEST_CASE("solution files: small, empty, and canonical round-trip") {
  const fs::path dir = temp_dir("solution");

  Solution s;
  s.event_id = 4;
  s.entries = {{1, 1}, {2, 1}, {3, 2}};
  write_solution(s, dir / "s.csv");
  CHECK(slurp(dir / "s.csv") ==
        "event_id,hit_id,track_id\n4,1,1\n4,2,1\n4,3,2\n");

  Solution empty;
  empty.event_id = 9;
  write_solution(empty, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == "event_id,hit_id,track_id\n");

  // randomized: write -> read -> write is byte-identical
  std::mt19937_64 rng(11);
  Solution big;
  big.event_id = 17;
  std::uniform_int_distribution<std::int64_t> track(0, 99);
  for (std::int64_t id = 1; id <= 1000; ++id) {
    big.entries.push_back({id, track(rng)});
  }
  std::shuffle(big.entries.begin(), big.entries.end(), rng);
  write_solution(big, dir / "big1.csv");
  const Solution readback = read_solution(dir / "big1.csv");
  write_solution(readback, dir / "big2.csv");
  CHECK(slurp(dir / "big1.csv") == slurp(dir / "big2.csv"));
  CHECK(readback.entries.size() == 1000);
  big.canonicalize();
  CHECK(readback.track_of(1) == big.track_of(1));
  CHECK(readback.track_of(543) == big.track_of(543));
  CHECK(readback.track_of(5000) == 0);  // unknown hit

  CHECK_THROWS_AS(read_solution(dir / "missing.csv"), IoError);
}

TEST_CASE("solution files reject a wrong header") {
  const fs::path dir = temp_dir("solution_header");
  {
    std::ofstream out(dir / "bad.csv");
    out << "event_id,hit_id\n1,2\n";
  }
  CHECK_THROWS_AS(read_solution(dir / "bad.csv"), ValidationError);
}

TEST_CASE("solution rejects duplicate hit assignments") {
  Solution s;
  s.event_id = 1;
  s.entries = {{1, 1}, {1, 2}};
  CHECK_THROWS_AS(s.canonicalize(), ValidationError);
}
