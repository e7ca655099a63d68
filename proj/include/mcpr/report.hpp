#pragma once

// Result types shared by the exact solvers, the heuristic and the
// enumeration oracle.

#include <chrono>
#include <string>
#include <vector>

#include "mcpr/instance.hpp"

namespace mcpr {

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

enum class SolveStatus { Optimal, Feasible, TimeLimit, Infeasible };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct SolveCounters {
  int outer_iters = 0;    // objective-cut rounds
  int sec_rounds = 0;     // subtour-cut rounds
  int master_solves = 0;
  int cuts_oa = 0;
  int cuts_sub1 = 0;
  int cuts_sub2 = 0;
  int cuts_sec1 = 0;
  int cuts_sec2 = 0;

  int total_cuts() const { return cuts_oa + cuts_sub1 + cuts_sub2 + cuts_sec1 + cuts_sec2; }
};

struct SolveReport {
  Vec best_x;                  // length m, binary
  std::vector<int> best_tour;  // node order [0, ..., 0]; [0, 0] when empty
  double objective = 0;
  double bound = 0;            // valid upper bound on the optimum
  SolveStatus status = SolveStatus::Feasible;
  SolveCounters counters;
  double wall_time_s = 0;
};

}  // namespace mcpr
