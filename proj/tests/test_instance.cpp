#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "mcpr/instance.hpp"

using mcpr::Instance;
using mcpr::Vec;

namespace {

const char* kTinyText =
    "# two candidate locations at unit distance, one customer zone\n"
    "MCPR t1 2 1 2 3\n"
    "MATRIX\n"
    "0 1 1\n"
    "1 0 1\n"
    "1 1 0\n"
    "1 1 1 3\n";

}  // namespace

TEST_CASE("matrix form parses into all fields", "[instance]") {
  Instance inst = mcpr::parse_instance(kTinyText);
  CHECK(inst.name == "t1");
  CHECK(inst.m == 2);
  CHECK(inst.cap_c == 2);
  CHECK(inst.t_max == 3.0);
  CHECK_FALSE(inst.coords.has_value());
  REQUIRE(inst.zone_count() == 1);
  CHECK(inst.zones[0].demand == 1.0);
  CHECK(inst.zones[0].competitor == 1.0);
  CHECK(inst.zones[0].attraction == Vec{1.0, 3.0});
  CHECK(inst.travel.at(0, 2) == 1.0);
  CHECK(inst.travel.at(2, 2) == 0.0);
  CHECK(inst.total_demand() == 1.0);
}

TEST_CASE("coordinate form builds euclidean travel times", "[instance]") {
  Instance inst = mcpr::parse_instance(
      "MCPR planar 2 1 1 20\n"
      "0 0 0\n"
      "1 3 4\n"
      "2 0 8\n"
      "2 1 1 1\n");
  REQUIRE(inst.coords.has_value());
  CHECK(inst.travel.at(0, 1) == 5.0);
  CHECK(inst.travel.at(0, 2) == 8.0);
  CHECK(inst.travel.at(1, 2) == 5.0);
  CHECK(inst.travel.at(1, 0) == inst.travel.at(0, 1));
}

TEST_CASE("malformed inputs are rejected", "[instance]") {
  CHECK_THROWS(mcpr::parse_instance(""));
  CHECK_THROWS(mcpr::parse_instance("TSP t1 2 1 2 3\nMATRIX\n0 1 1\n1 0 1\n1 1 0\n1 1 1 3\n"));
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 2 1 2 3\nMATRIX\n0 1 1\n1 0 1\n"));
  CHECK_THROWS(mcpr::parse_instance(std::string(kTinyText) + "42\n"));
  // zone rows: zero demand, zero competitor utility, zero attraction
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 1 1 1 3\nMATRIX\n0 1\n1 0\n0 1 1\n"));
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 1 1 1 3\nMATRIX\n0 1\n1 0\n1 0 1\n"));
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 1 1 1 3\nMATRIX\n0 1\n1 0\n1 1 0\n"));
  // asymmetric travel matrix
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 1 1 1 3\nMATRIX\n0 1\n2 0\n1 1 1\n"));
  // cardinality cap above m
  CHECK_THROWS(mcpr::parse_instance("MCPR t1 1 1 5 3\nMATRIX\n0 1\n1 0\n1 1 1\n"));
}

TEST_CASE("serialize and parse round-trip both geometry forms", "[instance]") {
  Instance a = mcpr::parse_instance(kTinyText);
  Instance a2 = mcpr::parse_instance(mcpr::serialize_instance(a));
  CHECK(a2.name == a.name);
  CHECK(a2.m == a.m);
  CHECK(a2.cap_c == a.cap_c);
  CHECK(a2.t_max == a.t_max);
  CHECK(a2.zones[0].attraction == a.zones[0].attraction);
  for (int i = 0; i <= a.m; ++i)
    for (int j = 0; j <= a.m; ++j) CHECK(a2.travel.at(i, j) == a.travel.at(i, j));

  Instance b = mcpr::generate_synthetic(5, 7, 42);
  Instance b2 = mcpr::parse_instance(mcpr::serialize_instance(b));
  REQUIRE(b2.coords.has_value());
  CHECK(mcpr::serialize_instance(b2) == mcpr::serialize_instance(b));
  for (int i = 0; i <= b.m; ++i)
    for (int j = 0; j <= b.m; ++j) CHECK(b2.travel.at(i, j) == b.travel.at(i, j));
}

TEST_CASE("budget comparisons share one boundary tolerance", "[instance]") {
  Instance inst = fx::tiny2();
  CHECK(inst.fits_budget(3.0));
  CHECK(inst.fits_budget(3.0 + 0.5e-9));
  CHECK_FALSE(inst.fits_budget(3.0 + 1.0e-8));
  CHECK(inst.depot_time(1) == 1.0);
  CHECK(inst.time(0, 1) == 1.0);
}

TEST_CASE("synthetic generation is seed-deterministic and valid", "[instance]") {
  Instance a = mcpr::generate_synthetic(6, 11, 9001);
  Instance b = mcpr::generate_synthetic(6, 11, 9001);
  Instance c = mcpr::generate_synthetic(6, 11, 9002);
  CHECK(mcpr::serialize_instance(a) == mcpr::serialize_instance(b));
  CHECK(mcpr::serialize_instance(a) != mcpr::serialize_instance(c));
  CHECK(a.name == "synth-m6-z11-s9001");
  CHECK(a.m == 6);
  CHECK(a.zone_count() == 11);
  CHECK(a.cap_c == 6);
  CHECK(a.t_max > 0);
  for (const mcpr::Zone& z : a.zones) {
    CHECK(z.demand >= 1.0);
    CHECK(z.demand <= 100.0);
    CHECK(z.competitor == 1.0);
    for (double v : z.attraction) {
      CHECK(v > 0.3);  // exp(-1)
      CHECK(v < 2.8);  // exp(1)
    }
  }
  CHECK_THROWS_AS(mcpr::generate_synthetic(0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(mcpr::generate_synthetic(5, 0, 1), std::invalid_argument);
}

TEST_CASE("budget variants scale only the tour budget", "[instance]") {
  Instance base = mcpr::generate_synthetic(5, 8, 3);
  std::vector<Instance> vars = mcpr::derive_budget_variants(base, {1.0, 2.0, 3.0});
  REQUIRE(vars.size() == 3);
  CHECK(vars[0].t_max == base.t_max);
  CHECK(vars[1].t_max == 2.0 * base.t_max);
  CHECK(vars[2].t_max == 3.0 * base.t_max);
  for (const Instance& v : vars) {
    CHECK(v.name == base.name);
    CHECK(v.m == base.m);
    CHECK(mcpr::serialize_instance(v).substr(0, 4) == "MCPR");
  }
  CHECK_THROWS_AS(mcpr::derive_budget_variants(base, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(mcpr::derive_budget_variants(base, {-2.0}), std::invalid_argument);
}
