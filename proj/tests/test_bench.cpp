#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mcpr/bench.hpp"

using mcpr::BenchResult;
using mcpr::BenchRow;
using mcpr::Instance;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// wall times differ run to run; blank them before comparing
std::string strip_times(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols = split(line, ',');
    if (cols.size() == 10) cols[6] = "-";
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("result rows serialize to the pinned column layout", "[bench]") {
  CHECK(mcpr::csv_header() ==
        "instance,method,seed,objective,bound,status,time_s,outer_iters,sec_iters,cuts");

  BenchRow row;
  row.instance = "t1";
  row.method = "ncp";
  row.seed = 0;
  row.objective = 0.8;
  row.bound = 1.0;
  row.status = "optimal";
  row.time_s = 1.5;
  row.outer_iters = 2;
  row.sec_iters = 0;
  row.cuts = 2;
  CHECK(mcpr::to_csv(row) == "t1,ncp,0,0.80000000000000004,1,optimal,1.500,2,0,2");
}

TEST_CASE("method dispatch covers every solver", "[bench]") {
  CHECK(mcpr::is_exact_method("ncp"));
  CHECK(mcpr::is_exact_method("nbc"));
  CHECK(mcpr::is_exact_method("cp-mtz"));
  CHECK(mcpr::is_exact_method("brute"));
  CHECK_FALSE(mcpr::is_exact_method("ils"));

  Instance inst = fx::tiny2();
  mcpr::SolveConfig cfg;
  mcpr::IlsConfig ils_cfg;
  ils_cfg.nb_iter = 10;
  for (const char* method : {"ncp", "nbc", "cp-mtz", "brute", "ils"}) {
    INFO(method);
    CHECK(mcpr::run_method(inst, method, cfg, ils_cfg, 1).objective == 0.8);
  }
  CHECK_THROWS_WITH(mcpr::run_method(inst, "simplex", cfg, ils_cfg, 0),
                    Catch::Matchers::ContainsSubstring("unknown method 'simplex'"));
}

TEST_CASE("benchmark scores methods against the oracle", "[bench]") {
  std::vector<Instance> instances{fx::tiny2(), mcpr::two_cluster_fixture()};
  std::vector<std::string> methods{"ncp", "ils"};
  mcpr::SolveConfig cfg;
  mcpr::IlsConfig ils_cfg;
  ils_cfg.nb_iter = 30;
  ils_cfg.runs = 3;

  BenchResult res = mcpr::run_bench(instances, methods, cfg, ils_cfg);
  REQUIRE(res.rows.size() == 8);  // per instance: one exact row and three seeds

  CHECK(res.rows[0].instance == "tiny2");
  CHECK(res.rows[0].method == "ils");
  CHECK(res.rows[0].seed == 1);
  CHECK(res.rows[3].method == "ncp");
  CHECK(res.rows[3].seed == 0);
  CHECK(res.rows[3].objective == 0.8);
  CHECK(res.rows[3].status == "optimal");
  CHECK(res.rows[4].instance == "two-cluster");
  CHECK(res.rows[7].method == "ncp");

  CHECK(res.csv.rfind(mcpr::csv_header() + "\n", 0) == 0);
  CHECK(split(res.csv, '\n').size() == 10);  // header + 8 rows + trailing newline

  CHECK(res.summary.rfind("| method | #Opt | #Best | mean time (s) |", 0) == 0);
  CHECK(res.summary.find("| ncp | 2 | 2 |") != std::string::npos);
  CHECK(res.summary.find("| ils | 2 | 2 |") != std::string::npos);
}

TEST_CASE("benchmark output is reproducible up to wall time", "[bench]") {
  std::vector<Instance> instances{fx::tiny2(), fx::two_cluster_wide()};
  std::vector<std::string> methods{"ncp", "nbc", "cp-mtz", "ils"};
  mcpr::SolveConfig cfg;
  mcpr::IlsConfig ils_cfg;
  ils_cfg.nb_iter = 15;
  ils_cfg.runs = 2;

  BenchResult a = mcpr::run_bench(instances, methods, cfg, ils_cfg);
  BenchResult b = mcpr::run_bench(instances, methods, cfg, ils_cfg);
  CHECK(strip_times(a.csv) == strip_times(b.csv));
}

TEST_CASE("failures become error rows and the run continues", "[bench]") {
  // 26 locations exceed the enumeration guard, so the exact method errors out
  std::vector<Instance> instances{mcpr::generate_synthetic(26, 3, 5), fx::tiny2()};
  BenchResult res = mcpr::run_bench(instances, {"ncp"}, mcpr::SolveConfig{}, mcpr::IlsConfig{});
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].instance == "synth-m26-z3-s5");
  CHECK(res.rows[0].status == "error");
  CHECK(res.rows[1].status == "optimal");
  CHECK(res.summary.find("| ncp | 1 |") != std::string::npos);
}

TEST_CASE("above the oracle range exact methods score by their own bound", "[bench]") {
  std::vector<Instance> instances{mcpr::generate_synthetic(15, 4, 6)};
  BenchResult res = mcpr::run_bench(instances, {"ncp"}, mcpr::SolveConfig{}, mcpr::IlsConfig{});
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].status == "optimal");
  CHECK(res.summary.find("| ncp | 1 | 1 |") != std::string::npos);
}
