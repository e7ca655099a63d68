#pragma once

// Benchmark harness: runs a method matrix over a set of instances and
// aggregates per-method optimality and best-objective counts into a CSV plus
// a small Markdown table. Exact methods run once (seed column 0); the
// heuristic runs with seeds 1..runs and is aggregated by its best seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcpr/ils.hpp"
#include "mcpr/instance.hpp"
#include "mcpr/oracle.hpp"
#include "mcpr/report.hpp"
#include "mcpr/solver.hpp"

namespace mcpr {

struct BenchRow {
  std::string instance;
  std::string method;
  std::uint64_t seed = 0;
  double objective = 0;
  double bound = 0;
  std::string status;
  double time_s = 0;
  int outer_iters = 0;
  int sec_iters = 0;
  int cuts = 0;
};

inline std::string csv_header() {
  return "instance,method,seed,objective,bound,status,time_s,outer_iters,sec_iters,cuts";
}

inline std::string to_csv(const BenchRow& r) {
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.3f", r.time_s);
  return r.instance + ',' + r.method + ',' + std::to_string(r.seed) + ',' +
         detail::fmt17(r.objective) + ',' + detail::fmt17(r.bound) + ',' + r.status + ',' +
         time_buf + ',' + std::to_string(r.outer_iters) + ',' + std::to_string(r.sec_iters) +
         ',' + std::to_string(r.cuts);
}

inline bool is_exact_method(const std::string& method) {
  return method == "ncp" || method == "nbc" || method == "cp-mtz" || method == "brute";
}

// Dispatch for the solving methods; the export methods are file side effects
// and live with the command-line front end.
inline SolveReport run_method(const Instance& inst, const std::string& method,
                              const SolveConfig& cfg, const IlsConfig& ils_cfg,
                              std::uint64_t seed) {
  if (method == "ncp") return nested_cutting_plane(inst, cfg);
  if (method == "nbc") return nested_branch_and_cut(inst, cfg);
  if (method == "cp-mtz") return cp_mtz(inst, cfg);
  if (method == "brute") return brute_force_optimum(inst);
  if (method == "ils") return ils_run(inst, ils_cfg, seed);
  throw std::invalid_argument("unknown method '" + method + "'");
}

inline BenchRow make_bench_row(const Instance& inst, const std::string& method,
                               std::uint64_t seed, const SolveReport& rep) {
  BenchRow r;
  r.instance = inst.name;
  r.method = method;
  r.seed = seed;
  r.objective = rep.objective;
  r.bound = rep.bound;
  r.status = to_string(rep.status);
  r.time_s = rep.wall_time_s;
  r.outer_iters = rep.counters.outer_iters;
  r.sec_iters = rep.counters.sec_rounds;
  r.cuts = rep.counters.total_cuts();
  return r;
}

struct BenchResult {
  std::vector<BenchRow> rows;  // sorted by (instance, method, seed)
  std::string csv;             // header + one line per row
  std::string summary;         // Markdown table
};

// Runs every requested method on every instance. Optimality is scored
// against the enumeration oracle where it is available (m <= 14); above
// that, exact methods score by their own bound gap. "Best" marks methods
// whose (best-of-seeds) objective reaches the per-instance maximum within
// 1e-9. Failures become rows with status "error" and the run continues.
inline BenchResult run_bench(const std::vector<Instance>& instances,
                             const std::vector<std::string>& methods, const SolveConfig& cfg,
                             const IlsConfig& ils_cfg) {
  BenchResult out;
  std::map<std::string, double> oracle;  // instance -> optimum, when available

  for (const Instance& inst : instances) {
    if (inst.m <= 14) oracle[inst.name] = brute_force_optimum(inst).objective;
    for (const std::string& method : methods) {
      std::vector<std::uint64_t> seeds;
      if (method == "ils")
        for (int s = 1; s <= ils_cfg.runs; ++s) seeds.push_back(s);
      else
        seeds.push_back(0);
      for (std::uint64_t seed : seeds) {
        try {
          SolveReport rep = run_method(inst, method, cfg, ils_cfg, seed);
          out.rows.push_back(make_bench_row(inst, method, seed, rep));
        } catch (const std::exception&) {
          BenchRow r;
          r.instance = inst.name;
          r.method = method;
          r.seed = seed;
          r.status = "error";
          out.rows.push_back(r);
        }
      }
    }
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.instance != b.instance) return a.instance < b.instance;
    if (a.method != b.method) return a.method < b.method;
    return a.seed < b.seed;
  });

  out.csv = csv_header() + "\n";
  for (const BenchRow& r : out.rows) out.csv += to_csv(r) + "\n";

  // per (instance, method): best objective over seeds, total time
  std::map<std::pair<std::string, std::string>, double> best_obj;
  std::map<std::string, double> method_time;
  std::map<std::string, int> method_rows;
  for (const BenchRow& r : out.rows) {
    auto key = std::make_pair(r.instance, r.method);
    auto it = best_obj.find(key);
    if (it == best_obj.end() || r.objective > it->second) best_obj[key] = r.objective;
    method_time[r.method] += r.time_s;
    method_rows[r.method] += 1;
  }
  std::map<std::string, double> instance_best;
  for (const auto& [key, obj] : best_obj) {
    auto it = instance_best.find(key.first);
    if (it == instance_best.end() || obj > it->second) instance_best[key.first] = obj;
  }

  std::map<std::string, int> opt_count, best_count;
  std::map<std::pair<std::string, std::string>, const BenchRow*> exact_row;
  for (const BenchRow& r : out.rows)
    if (r.seed == 0) exact_row[{r.instance, r.method}] = &r;
  for (const auto& [key, obj] : best_obj) {
    const std::string& name = key.first;
    const std::string& method = key.second;
    if (obj >= instance_best[name] - 1e-9) best_count[method] += 1;
    auto ora = oracle.find(name);
    if (ora != oracle.end()) {
      if (std::fabs(obj - ora->second) <= 1e-9) opt_count[method] += 1;
    } else if (is_exact_method(method)) {
      auto row = exact_row.find(key);
      if (row != exact_row.end() && row->second->status == "optimal" &&
          row->second->bound - row->second->objective <= cfg.epsilon)
        opt_count[method] += 1;
    }
  }

  out.summary = "| method | #Opt | #Best | mean time (s) |\n|---|---|---|---|\n";
  for (const std::string& method : methods) {
    double mean = method_rows[method] ? method_time[method] / method_rows[method] : 0.0;
    char mean_buf[32];
    std::snprintf(mean_buf, sizeof mean_buf, "%.3f", mean);
    out.summary += "| " + method + " | " + std::to_string(opt_count[method]) + " | " +
                   std::to_string(best_count[method]) + " | " + mean_buf + " |\n";
  }
  return out;
}

}  // namespace mcpr
