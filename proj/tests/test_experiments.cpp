#include <cmath>

#include "capball/errors.hpp"
#include "capball/experiments.hpp"
#include "capball/numerics.hpp"
#include "capball/parallel.hpp"
#include "doctest.h"

using namespace capball;
using numerics::kPi;

TEST_CASE("experiment configs") {
  for (const auto& id : experiment_ids()) {
    const auto c = default_config(id);
    CHECK(c.id == id);
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_digest(back) == config_digest(c));
    CHECK(config_digest(c).size() == 16);
  }
  CHECK_THROWS_AS(default_config("nope"), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"mesh", 3}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"id", "oracle"}, {"mesh", "many"}}), ConfigError);

  auto c = default_config("oracle");
  const auto before = config_digest(c);
  c.seed += 1;
  CHECK(config_digest(c) != before);
  const auto partial = config_from_json({{"id", "identities"}, {"samples", 7}});
  CHECK(partial.samples == 7);
  CHECK(partial.truncation == kDefaultTruncation);

  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(fmt17(-0.0) == "0");
}

TEST_CASE("reports are pure functions of the config") {
  auto c = default_config("identities");
  c.samples = 10;
  const auto r1 = run_identity_suite(c);
  const auto r2 = run_experiment(c);
  CHECK(r1.json.dump() == r2.json.dump());
  CHECK(r1.csv == r2.csv);
  CHECK(r1.json["configDigest"] == config_digest(c));
  CHECK(r1.json["version"] == kVersion);
  CHECK(r1.passed);

  auto o = default_config("oracle");
  o.meshes = {8, 16};
  o.samples = 2;
  set_thread_count(1);
  const auto serial = run_oracle_equivalence(o);
  set_thread_count(4);
  const auto threaded = run_oracle_equivalence(o);
  set_thread_count(1);
  CHECK(serial.json.dump() == threaded.json.dump());
  CHECK(serial.passed);
  o.meshes = {128};
  CHECK_THROWS_AS(run_oracle_equivalence(o), ConfigError);
}

TEST_CASE("pick and regularity report") {
  const auto r = run_pick_and_regularity(default_config("pick-regularity"));
  CHECK(r.passed);
  for (const auto& sp : r.json["spaces"]) {
    const auto name = sp["space"].get<std::string>();
    const double p = sp["parameter"].get<double>();
    if (name == "D_a" && p == 2.0) CHECK(sp["firstNegative"] == 2);
    if (name == "D_a" && p == 0.0) CHECK(sp["firstNegative"] == 2);  // plain log kernel
    if (name == "D_0-modified") CHECK(sp["pick"].get<bool>());
    CHECK(sp["ratioSettledAt"].get<int>() <= 100);
  }
  CHECK(r.csv.rfind("space,parameter,n,a_n,b_n,ratio\n", 0) == 0);
}

TEST_CASE("comparability report") {
  auto c = default_config("comparability", 1, 0.5);
  c.samples = 10;
  c.mesh = 32;
  const auto r = run_comparability(c);
  CHECK(r.passed);
  for (const char* k : {"c1", "c2", "ratio", "ratioAtMinDistance"}) CHECK(r.json["kernelWindow"].contains(k));
  CHECK(r.json["kernelWindow"]["ratio"].get<double>() <= 50.0);
  CHECK(r.json["checks"]["swapSymmetric"].get<bool>());
  CHECK_THROWS_AS(run_comparability(default_config("comparability", 1, 0.6)), DomainError);
  CHECK_THROWS_AS(run_comparability(default_config("comparability", 3, 1.25)), UnsupportedDimension);
}

TEST_CASE("anchor report") {
  auto c = default_config("anchor");
  c.mesh = 512;
  const auto r = run_circle_anchor(c);
  CHECK(r.passed);
  CHECK(std::abs(r.json["result"]["capacity"].get<double>() - 1.0) < 1e-3);
}

TEST_CASE("capacity battery flags a broken chain") {
  auto c = default_config("capacity-battery");
  c.mesh = 64;
  c.meshes = {64, 128, 256, 512};
  c.battery = {SetSpec::arc(0.0, 1.0), SetSpec::arc(0.5, 2.0)};
  const auto r = run_capacity_battery(c);
  CHECK_FALSE(r.json["checks"]["chainNested"].get<bool>());
  CHECK_FALSE(r.passed);
  CHECK(r.json["checks"]["arcSweepIncreasing"].get<bool>());
  CHECK(r.json["checks"]["cantorRatioDecreasing"].get<bool>());
  c.meshes = {64, 128};
  CHECK_THROWS_AS(run_capacity_battery(c), ConfigError);
}

TEST_CASE("extremal audit on a small config") {
  auto c = default_config("extremal-audit");
  c.a_values = {0.0};
  c.battery = {SetSpec::arc(0.0, kPi / 2)};
  c.mesh = 32;
  c.truncation = 1 << 16;
  const auto r = run_extremal_audit(c);
  CHECK(r.passed);
  for (const auto& row : r.json["rows"]) {
    if (row["family"] == "circle") {
      // uniform measure: f_mu is the constant capacity
      CHECK(row["radialFloor"].get<double>() == doctest::Approx(row["capacity"].get<double>()).epsilon(1e-9));
    }
  }
  c.a_values = {1.0};
  CHECK_THROWS_AS(run_extremal_audit(c), ConfigError);
  c.a_values = {0.0};
  c.battery = {SetSpec::cantor(0.0, 1.0, {0.25}, 2)};
  CHECK_THROWS_AS(run_extremal_audit(c), ConfigError);
}

TEST_CASE("multiplier suite on a small config") {
  auto c = default_config("multiplier");
  c.battery = {SetSpec::arc(0.0, kPi / 4)};
  c.truncation = 128;
  c.meshes = {16, 64, 129};
  c.mesh = 32;
  const auto r = run_multiplier_suite(c);
  CHECK(r.passed);
  CHECK(r.json["sectionOverSupWindows"].size() == 2);
  c.meshes = {200};
  CHECK_THROWS_AS(run_multiplier_suite(c), ConfigError);
}
