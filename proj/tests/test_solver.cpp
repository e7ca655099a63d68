#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mcpr/oracle.hpp"
#include "mcpr/solver.hpp"

using mcpr::GroupPartition;
using mcpr::Instance;
using mcpr::SolveConfig;
using mcpr::SolveReport;
using mcpr::SolveStatus;
using mcpr::Vec;

namespace {

Vec selection(std::uint32_t mask, int m) {
  Vec x(m, 0.0);
  for (int i = 0; i < m; ++i)
    if (mask >> i & 1u) x[i] = 1.0;
  return x;
}

void check_report_sane(const Instance& inst, const SolveReport& rep, double epsilon) {
  CHECK(rep.status == SolveStatus::Optimal);
  CHECK(rep.bound >= rep.objective - 1e-12);
  CHECK(rep.bound - rep.objective <= epsilon + 1e-12);
  CHECK(mcpr::eval_objective(inst, rep.best_x) == Catch::Approx(rep.objective).margin(1e-12));
  double len = 0;
  for (std::size_t i = 1; i < rep.best_tour.size(); ++i)
    len += inst.travel.at(rep.best_tour[i - 1], rep.best_tour[i]);
  CHECK(inst.fits_budget(len));
}

}  // namespace

TEST_CASE("group bounds shrink as cuts accumulate", "[solver]") {
  Instance inst = fx::tiny2();
  GroupPartition part = mcpr::partition_zones(inst, 1);
  mcpr::CutPool pool(1);
  Vec full{1.0, 1.0};
  Vec none{0.0, 0.0};

  // empty pool: the bound is the group demand
  CHECK(mcpr::theta_upper_bound(pool, part, inst, full) == std::vector<double>{1.0});

  // the tangent at the empty selection is loose at the full one (0 + 1 + 3)
  pool.add(mcpr::oa_cut(inst, part, 0, none));
  CHECK(mcpr::theta_upper_bound(pool, part, inst, full)[0] == 1.0);

  // the surrogate cut anchored at the full selection is tight there
  pool.add(mcpr::submodular_cut_1(inst, part, 0, full));
  CHECK(mcpr::theta_upper_bound(pool, part, inst, full)[0] == 0.8);

  // and at the empty selection the tangent pins the bound to its exact value
  CHECK(mcpr::theta_upper_bound(pool, part, inst, none)[0] == 0.0);
}

TEST_CASE("master maximizes the bound subject to routing", "[solver]") {
  Instance inst = fx::tiny2();
  GroupPartition part = mcpr::partition_zones(inst, 20);
  mcpr::CutPool pool(1);
  SolveConfig cfg;

  mcpr::MasterSolution sol = mcpr::solve_master(inst, part, pool, cfg);
  CHECK(sol.mask == 3u);
  CHECK(sol.x == Vec{1.0, 1.0});
  CHECK(sol.sum_theta == 1.0);
  CHECK(sol.tour == std::vector<int>{0, 1, 2, 0});
  CHECK(sol.y.at(0, 1) == 1);
  CHECK(sol.y.at(0, 2) == 1);
  CHECK(sol.y.at(1, 2) == 1);

  // bounds tie everywhere, so routing decides: nothing fits and the empty
  // selection wins with the depot stub tour
  Instance blocked = inst;
  blocked.t_max = 1.5;
  sol = mcpr::solve_master(blocked, part, pool, cfg);
  CHECK(sol.mask == 0u);
  CHECK(sol.x == Vec{0.0, 0.0});
  CHECK(sol.sum_theta == 1.0);
  CHECK(sol.tour == std::vector<int>{0, 0});
  CHECK(sol.y.at(0, 1) == 0);
  CHECK(sol.y.at(0, 2) == 0);
}

TEST_CASE("enumeration guard bounds the master size", "[solver]") {
  Instance inst = mcpr::two_cluster_fixture();
  GroupPartition part = mcpr::partition_zones(inst, 20);
  mcpr::CutPool pool(static_cast<int>(part.size()));
  SolveConfig cfg;
  cfg.backend_guard = 4;
  CHECK_THROWS_WITH(mcpr::solve_master(inst, part, pool, cfg),
                    Catch::Matchers::ContainsSubstring("enumeration guard (4)"));
  CHECK_THROWS_AS(mcpr::nested_cutting_plane(inst, cfg), std::invalid_argument);
  CHECK_THROWS_AS(mcpr::nested_branch_and_cut(inst, cfg), std::invalid_argument);
  CHECK_THROWS_AS(mcpr::cp_mtz(inst, cfg), std::invalid_argument);

  // the default guard refuses a 25-location instance before any enumeration
  Instance big = mcpr::generate_synthetic(25, 2, 9);
  CHECK_THROWS_WITH(mcpr::nested_cutting_plane(big, SolveConfig{}),
                    Catch::Matchers::ContainsSubstring("enumeration guard (24)"));
}

TEST_CASE("cutting plane trajectory on the two-location instance", "[solver]") {
  Instance inst = fx::tiny2();
  std::ostringstream trace;
  SolveConfig cfg;
  cfg.trace = &trace;
  SolveReport rep = mcpr::nested_cutting_plane(inst, cfg);

  CHECK(rep.status == SolveStatus::Optimal);
  CHECK(rep.objective == 0.8);
  CHECK(rep.bound == 0.8);
  CHECK(rep.best_x == Vec{1.0, 1.0});
  CHECK(rep.best_tour == std::vector<int>{0, 1, 2, 0});
  CHECK(rep.counters.outer_iters == 2);
  CHECK(rep.counters.master_solves == 2);
  CHECK(rep.counters.cuts_oa == 1);
  CHECK(rep.counters.cuts_sub1 == 1);
  CHECK(rep.counters.cuts_sub2 == 0);  // coincides with the first surrogate at this anchor
  CHECK(rep.counters.sec_rounds == 0);
  CHECK(rep.counters.cuts_sec1 == 0);
  CHECK(rep.counters.cuts_sec2 == 0);
  CHECK(rep.counters.total_cuts() == 2);

  CHECK(trace.str() ==
        "iteration,sum_theta,f_xbar,cuts_added,sec_rounds\n"
        "1,1,0.80000000000000004,2,0\n"
        "2,0.80000000000000004,0.80000000000000004,0,0\n");
}

TEST_CASE("branch and cut trajectory on the two-location instance", "[solver]") {
  Instance inst = fx::tiny2();
  SolveReport rep = mcpr::nested_branch_and_cut(inst, SolveConfig{});
  CHECK(rep.status == SolveStatus::Optimal);
  CHECK(rep.objective == 0.8);
  CHECK(rep.bound == 0.8);
  CHECK(rep.best_x == Vec{1.0, 1.0});
  CHECK(rep.best_tour == std::vector<int>{0, 1, 2, 0});
  CHECK(rep.counters.outer_iters == 2);
  // pops: process the full selection, find three siblings stale, process again
  CHECK(rep.counters.master_solves == 5);
  CHECK(rep.counters.cuts_oa == 1);
  CHECK(rep.counters.cuts_sub1 == 1);
  CHECK(rep.counters.cuts_sub2 == 0);
  CHECK(rep.counters.sec_rounds == 0);
}

TEST_CASE("tour-oracle cutting plane trajectory on the two-location instance", "[solver]") {
  Instance inst = fx::tiny2();
  std::ostringstream trace;
  SolveConfig cfg;
  cfg.trace = &trace;
  SolveReport rep = mcpr::cp_mtz(inst, cfg);
  CHECK(rep.status == SolveStatus::Optimal);
  CHECK(rep.objective == 0.8);
  CHECK(rep.bound == 0.8);
  CHECK(rep.best_tour == std::vector<int>{0, 1, 2, 0});
  CHECK(rep.counters.outer_iters == 2);
  CHECK(rep.counters.master_solves == 2);
  CHECK(rep.counters.sec_rounds == 0);  // the tour oracle never emits subtour cuts
  CHECK(trace.str().rfind("iteration,sum_theta,f_xbar,cuts_added,sec_rounds\n", 0) == 0);
}

TEST_CASE("exact methods agree with the enumeration oracle", "[solver]") {
  std::vector<Instance> suite;
  suite.push_back(mcpr::two_cluster_fixture());
  suite.push_back(mcpr::generate_synthetic(6, 8, 11));
  suite.push_back(mcpr::generate_synthetic(7, 12, 12));
  suite.push_back(mcpr::derive_budget_variants(mcpr::generate_synthetic(7, 12, 12), {2.0})[0]);

  SolveConfig cfg;
  for (const Instance& inst : suite) {
    INFO(inst.name);
    SolveReport ref = mcpr::brute_force_optimum(inst);
    for (SolveReport rep : {mcpr::nested_cutting_plane(inst, cfg),
                            mcpr::nested_branch_and_cut(inst, cfg), mcpr::cp_mtz(inst, cfg)}) {
      CHECK(rep.objective == Catch::Approx(ref.objective).margin(1e-9));
      check_report_sane(inst, rep, cfg.epsilon);
    }
  }

  // the narrow fixture cannot host an orphan cycle within its cardinality cap
  SolveReport rep = mcpr::nested_cutting_plane(mcpr::two_cluster_fixture(), cfg);
  CHECK(rep.counters.sec_rounds == 0);
  CHECK(rep.best_x == Vec{0.0, 0.0, 1.0, 1.0, 1.0});
  CHECK(rep.objective == Catch::Approx(123.0 / 70.0).margin(1e-12));
}

TEST_CASE("wide fixture forces subtour separation", "[solver]") {
  Instance inst = fx::two_cluster_wide();
  SolveReport ref = mcpr::brute_force_optimum(inst);
  CHECK(ref.objective == Catch::Approx(123.0 / 70.0).margin(1e-12));

  SolveConfig cfg;
  SolveReport ncp = mcpr::nested_cutting_plane(inst, cfg);
  CHECK(ncp.objective == Catch::Approx(ref.objective).margin(1e-9));
  CHECK(ncp.best_x == Vec{0.0, 0.0, 1.0, 1.0, 1.0});
  CHECK(ncp.counters.sec_rounds >= 1);
  CHECK(ncp.counters.cuts_sec1 >= 1);
  CHECK(ncp.counters.cuts_sec2 >= 1);
  check_report_sane(inst, ncp, cfg.epsilon);

  SolveReport nbc = mcpr::nested_branch_and_cut(inst, cfg);
  CHECK(nbc.objective == Catch::Approx(ref.objective).margin(1e-9));
  CHECK(nbc.counters.sec_rounds >= 1);

  SolveReport mtz = mcpr::cp_mtz(inst, cfg);
  CHECK(mtz.objective == Catch::Approx(ref.objective).margin(1e-9));
  CHECK(mtz.counters.sec_rounds == 0);
}

TEST_CASE("both subtour-cut families separate on their own", "[solver]") {
  Instance inst = fx::two_cluster_wide();
  for (mcpr::SecVariant variant :
       {mcpr::SecVariant::Sec1, mcpr::SecVariant::Sec2, mcpr::SecVariant::Both}) {
    SolveConfig cfg;
    cfg.sec = variant;
    SolveReport rep = mcpr::nested_cutting_plane(inst, cfg);
    INFO("variant " << static_cast<int>(variant));
    CHECK(rep.objective == Catch::Approx(123.0 / 70.0).margin(1e-9));
    CHECK(rep.counters.sec_rounds >= 1);
    if (variant == mcpr::SecVariant::Sec1) {
      CHECK(rep.counters.cuts_sec1 >= 3);  // one crossing cut per member node
      CHECK(rep.counters.cuts_sec2 == 0);
    }
    if (variant == mcpr::SecVariant::Sec2) {
      CHECK(rep.counters.cuts_sec1 == 0);
      CHECK(rep.counters.cuts_sec2 >= 1);
    }
  }
}

TEST_CASE("relative tolerance still certifies the optimum", "[solver]") {
  Instance inst = mcpr::two_cluster_fixture();
  for (mcpr::Zone& z : inst.zones) z.demand = 50.0;  // push group values far above 1
  SolveConfig cfg;
  cfg.relative_eps = true;
  SolveReport rep = mcpr::nested_cutting_plane(inst, cfg);
  SolveReport ref = mcpr::brute_force_optimum(inst);
  CHECK(rep.status == SolveStatus::Optimal);
  CHECK(rep.objective == Catch::Approx(ref.objective).margin(1e-9));
}

TEST_CASE("a zero time limit reports the incumbent and a valid bound", "[solver]") {
  Instance inst = fx::tiny2();
  SolveConfig cfg;
  cfg.time_limit = 0.0;

  SolveReport ncp = mcpr::nested_cutting_plane(inst, cfg);
  CHECK(ncp.status == SolveStatus::TimeLimit);
  CHECK(ncp.objective == 0.8);  // incumbent from the first candidate
  CHECK(ncp.bound == 1.0);      // demand seed, still valid

  SolveReport nbc = mcpr::nested_branch_and_cut(inst, cfg);
  CHECK(nbc.status == SolveStatus::TimeLimit);
  CHECK(nbc.bound == 1.0);
  CHECK(nbc.objective <= nbc.bound);

  SolveReport mtz = mcpr::cp_mtz(inst, cfg);
  CHECK(mtz.status == SolveStatus::TimeLimit);
  CHECK(mtz.objective == 0.8);
  CHECK(mtz.bound == 1.0);
}

TEST_CASE("identical configurations reproduce identical reports", "[solver]") {
  Instance inst = mcpr::generate_synthetic(7, 15, 31);
  SolveConfig cfg;
  for (auto method : {mcpr::nested_cutting_plane, mcpr::nested_branch_and_cut, mcpr::cp_mtz}) {
    SolveReport a = method(inst, cfg);
    SolveReport b = method(inst, cfg);
    CHECK(a.objective == b.objective);
    CHECK(a.bound == b.bound);
    CHECK(a.best_x == b.best_x);
    CHECK(a.best_tour == b.best_tour);
    CHECK(a.counters.outer_iters == b.counters.outer_iters);
    CHECK(a.counters.total_cuts() == b.counters.total_cuts());
  }
}

TEST_CASE("tabulated bounds match the direct evaluation", "[solver]") {
  Instance inst = mcpr::two_cluster_fixture();
  GroupPartition part = mcpr::partition_zones(inst, 20);
  mcpr::CutPool pool(static_cast<int>(part.size()));
  for (Vec anchor : {Vec{0, 0, 0, 0, 0}, Vec{1, 1, 0, 0, 0}, Vec{0, 0, 1, 1, 1}}) {
    for (std::size_t l = 0; l < part.size(); ++l) {
      pool.add(mcpr::oa_cut(inst, part, static_cast<int>(l), anchor));
      pool.add(mcpr::submodular_cut_1(inst, part, static_cast<int>(l), anchor));
      pool.add(mcpr::submodular_cut_2(inst, part, static_cast<int>(l), anchor));
    }
  }
  mcpr::detail::ThetaTable table(inst, part, pool);
  table.refresh();
  for (std::uint32_t mask = 0; mask < (1u << 5); ++mask) {
    std::vector<double> direct = mcpr::theta_upper_bound(pool, part, inst, selection(mask, 5));
    std::vector<double> tab = table.row(mask);
    REQUIRE(tab.size() == direct.size());
    for (std::size_t l = 0; l < direct.size(); ++l)
      CHECK(tab[l] == Catch::Approx(direct[l]).margin(1e-12));
  }
}
