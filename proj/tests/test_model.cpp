#include <catch2/catch_amalgamated.hpp>

#include <cstdint>

#include "fixtures.hpp"
#include "mcpr/lp_io.hpp"
#include "mcpr/model.hpp"
#include "mcpr/oracle.hpp"

using mcpr::ConicModel;
using mcpr::Instance;
using mcpr::MipModel;
using mcpr::Vec;

TEST_CASE("tour skeleton has the documented shape", "[model]") {
  Instance inst = fx::tiny2();
  MipModel mdl = mcpr::build_mtz_model(inst);
  CHECK(mdl.name == "tiny2-mtz");
  // x1..x2, arcs {0..2} x {1..3}, p1..p2
  CHECK(mdl.vars.size() == 2 + 9 + 2);
  // depart, return, per-location in/out, budget, m^2 ordering rows
  CHECK(mdl.cons.size() == 2 + 4 + 1 + 4);
  CHECK(mdl.objective.empty());
  CHECK(mdl.find_var("y0_3") >= 0);   // direct depot-to-depot arc exists
  CHECK(mdl.find_var("y3_1") == -1);  // nothing leaves the duplicate depot
  int p1 = mdl.find_var("p1");
  REQUIRE(p1 >= 0);
  CHECK(mdl.vars[p1].kind == mcpr::VarKind::Continuous);
  CHECK(mdl.vars[p1].lb == 1.0);
  CHECK(mdl.vars[p1].ub == 2.0);
  // the degenerate i = j ordering row pins the self-loop arc to zero
  bool found_self = false;
  for (const auto& c : mdl.cons)
    if (c.name == "order1_1") {
      found_self = true;
      REQUIRE(c.terms.size() == 1);
      CHECK(c.terms[0].var == mdl.find_var("y1_1"));
      CHECK(c.terms[0].coeff == 2.0);
      CHECK(c.rhs == 1.0);
    }
  CHECK(found_self);
  CHECK_NOTHROW(mdl.validate());
}

TEST_CASE("skeleton feasibility agrees with the tour oracle", "[model]") {
  for (const Instance& inst : {fx::tiny2(), mcpr::two_cluster_fixture()}) {
    MipModel mdl = mcpr::build_mtz_model(inst);
    std::uint32_t full = std::uint32_t{1} << inst.m;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      Vec x(inst.m, 0.0);
      std::vector<int> locs;
      for (int i = 0; i < inst.m; ++i)
        if ((mask >> i) & 1u) {
          x[i] = 1.0;
          locs.push_back(i);
        }
      bool fits = inst.fits_budget(mcpr::tsp_length(inst, locs).length);
      CHECK(mcpr::mtz_assignment_exists(mdl, inst, x) == fits);
    }
  }
}

TEST_CASE("linearized model reproduces the objective at fixed selections", "[model]") {
  Instance inst = fx::tiny2();
  MipModel mdl = mcpr::build_linearized_milp(inst);
  CHECK(mdl.name == "tiny2-milp");
  CHECK(mdl.vars.size() == 13 + 1 + 2);       // skeleton + w1 + s1_1, s1_2
  CHECK(mdl.cons.size() == 11 + 1 + 1 + 8);   // + card + mix1 + four box rows per (n,i)
  REQUIRE(mdl.objective.size() == 2);
  CHECK(mdl.objective[0].coeff == 1.0);  // q V_11
  CHECK(mdl.objective[1].coeff == 3.0);  // q V_12

  for (std::uint32_t mask = 0; mask < 4; ++mask) {
    Vec x{double(mask & 1u), double((mask >> 1) & 1u)};
    double model_obj = mcpr::check_fixed_x_consistency(mdl, inst, x);
    CHECK(model_obj == Catch::Approx(mcpr::eval_objective(inst, x)).margin(1e-9));
  }

  mcpr::LinearizationBounds bounds = mcpr::default_linearization_bounds(inst);
  CHECK(bounds.upper == Vec{1.0});
  CHECK(bounds.lower == Vec{0.0});
  bounds.lower[0] = 2.0;  // lower above upper is rejected
  CHECK_THROWS_AS(mcpr::build_linearized_milp(inst, bounds), std::invalid_argument);
}

TEST_CASE("fractional model carries the constant objective offset", "[model]") {
  Instance inst = fx::tiny2();
  ConicModel conic = mcpr::build_conic_model(inst);
  CHECK(conic.mip.name == "tiny2-conic");
  CHECK(conic.mip.vars.size() == 13 + 2);  // + w1, r1
  CHECK(conic.mip.cons.size() == 11 + 1 + 1);
  REQUIRE(conic.hyperbolic.size() == 1);
  CHECK(conic.hyperbolic[0].zone == 0);
  CHECK(conic.hyperbolic[0].rhs == 1.0);
  CHECK(conic.mip.objective_offset == 1.0);  // total demand
  REQUIRE(conic.mip.objective.size() == 1);
  CHECK(conic.mip.objective[0].coeff == -1.0);  // -q U^c

  for (std::uint32_t mask = 0; mask < 4; ++mask) {
    Vec x{double(mask & 1u), double((mask >> 1) & 1u)};
    double model_obj = mcpr::check_fixed_x_consistency(conic, inst, x);
    CHECK(model_obj == Catch::Approx(mcpr::eval_objective(inst, x)).margin(1e-9));
  }
}

TEST_CASE("relaxed master has selection, edge and group variables", "[model]") {
  Instance inst = fx::tiny2();
  mcpr::GroupPartition part = mcpr::partition_zones(inst, 20);
  MipModel mdl = mcpr::build_master_model(inst, part);
  CHECK(mdl.vars.size() == 3 + 3 + 1);  // x0..x2, three undirected edges, theta1
  CHECK(mdl.cons.size() == 1 + 1 + 3 + 1);  // card, budget, three degree rows, depot pin
  int tv = mdl.find_var("theta1");
  REQUIRE(tv >= 0);
  CHECK(mdl.vars[tv].ub == 1.0);  // demand seed
  CHECK(mdl.vars[tv].role == mcpr::VarRole::GroupValue);
  REQUIRE(mdl.objective.size() == 1);
  CHECK(mdl.objective[0].var == tv);
  CHECK_NOTHROW(mdl.validate());
}

TEST_CASE("structural validation rejects broken models", "[model]") {
  MipModel mdl;
  mdl.add_var("x1", mcpr::VarKind::Binary, 0, 1, mcpr::VarRole::Select, 1);
  mdl.objective.push_back({3, 1.0});  // undeclared variable index
  CHECK_THROWS_AS(mdl.validate(), std::logic_error);
  mdl.objective.clear();
  mdl.vars[0].ub = 2.0;  // binary outside [0,1]
  CHECK_THROWS_AS(mdl.validate(), std::logic_error);
}

TEST_CASE("written files round-trip through the reader unchanged", "[lp]") {
  Instance tiny = fx::tiny2();
  Instance synth = mcpr::generate_synthetic(4, 6, 11);

  for (const Instance& inst : {tiny, synth}) {
    MipModel mtz = mcpr::build_mtz_model(inst);
    CHECK(mcpr::parse_lp(mcpr::write_lp(mtz)).mip == mtz);

    MipModel milp = mcpr::build_linearized_milp(inst);
    CHECK(mcpr::parse_lp(mcpr::write_lp(milp)).mip == milp);

    ConicModel conic = mcpr::build_conic_model(inst);
    ConicModel conic_back = mcpr::parse_lp(mcpr::write_lp(conic));
    CHECK(conic_back == conic);

    mcpr::GroupPartition part = mcpr::partition_zones(inst, 3);
    MipModel master = mcpr::build_master_model(inst, part);
    CHECK(mcpr::parse_lp(mcpr::write_lp(master)).mip == master);
  }
}

TEST_CASE("written text uses the documented dialect", "[lp]") {
  Instance inst = fx::tiny2();
  std::string text = mcpr::write_lp(mcpr::build_conic_model(inst));
  CHECK(text.rfind("\\ Problem: tiny2-conic\n", 0) == 0);
  CHECK(text.find("Maximize\n") != std::string::npos);
  CHECK(text.find("Subject To\n") != std::string::npos);
  CHECK(text.find("[ r1 * w1 ] >= 1") != std::string::npos);
  CHECK(text.find("Bounds\n") != std::string::npos);
  CHECK(text.find("Binaries\n") != std::string::npos);
  CHECK(text.find("End\n") != std::string::npos);
  // objective carries the constant total-demand term
  CHECK(text.find("obj: ") != std::string::npos);
  CHECK(text.find(" 1 ") != std::string::npos);
}

TEST_CASE("the reader rejects malformed text", "[lp]") {
  CHECK_THROWS(mcpr::parse_lp(""));
  CHECK_THROWS(mcpr::parse_lp("Maximize\n obj: x1\nEnd\n"));  // x1 never bounded
  std::string good = mcpr::write_lp(mcpr::build_mtz_model(fx::tiny2()));
  std::string truncated = good.substr(0, good.size() / 2);
  CHECK_THROWS(mcpr::parse_lp(truncated));
}
