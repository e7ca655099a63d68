#pragma once

// Reference answers obtained by enumeration, independent of the cut-based
// solvers: exact tour lengths by Held-Karp dynamic programming and the
// global optimum by subset enumeration. Also provides the two-cluster
// instance whose feasible sets form no matroid.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mcpr/instance.hpp"
#include "mcpr/objective.hpp"
#include "mcpr/report.hpp"

namespace mcpr {

struct TourResult {
  double length = 0;
  std::vector<int> order;  // node ids [0, ..., 0]
};

// Shortest depot-anchored tour through the given locations (0-based ids).
// Held-Karp over subsets; guarded at |S| <= 18. The returned order is
// canonical: the second node's id is <= the second-to-last node's id.
inline TourResult tsp_length(const Instance& inst, const std::vector<int>& locs) {
  int k = static_cast<int>(locs.size());
  if (k > 18) throw std::invalid_argument("tsp_length: more than 18 stops");
  for (int i : locs)
    if (i < 0 || i >= inst.m) throw std::invalid_argument("tsp_length: location out of range");

  if (k == 0) return {0.0, {0, 0}};
  if (k == 1) return {2 * inst.depot_time(locs[0]), {0, locs[0] + 1, 0}};

  std::vector<int> v(locs);
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw std::invalid_argument("tsp_length: duplicate location");

  const double inf = std::numeric_limits<double>::infinity();
  std::size_t full = std::size_t{1} << k;
  std::vector<double> dp(full * k, inf);
  std::vector<int> parent(full * k, -1);
  for (int i = 0; i < k; ++i) dp[(std::size_t{1} << i) * k + i] = inst.depot_time(v[i]);

  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int last = 0; last < k; ++last) {
      if (!(mask >> last & 1)) continue;
      double cur = dp[mask * k + last];
      if (cur == inf) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if (mask >> nxt & 1) continue;
        std::size_t nm = mask | (std::size_t{1} << nxt);
        double cand = cur + inst.time(v[last], v[nxt]);
        if (cand < dp[nm * k + nxt]) {
          dp[nm * k + nxt] = cand;
          parent[nm * k + nxt] = last;
        }
      }
    }
  }

  int best_end = -1;
  double best = inf;
  for (int last = 0; last < k; ++last) {
    double cand = dp[(full - 1) * k + last] + inst.depot_time(v[last]);
    if (cand < best) {
      best = cand;
      best_end = last;
    }
  }

  std::vector<int> seq;
  std::size_t mask = full - 1;
  int cur = best_end;
  while (cur >= 0) {
    seq.push_back(v[cur] + 1);
    int p = parent[mask * k + cur];
    mask ^= std::size_t{1} << cur;
    cur = p;
  }
  std::reverse(seq.begin(), seq.end());
  if (seq.front() > seq.back()) std::reverse(seq.begin(), seq.end());

  TourResult r;
  r.length = best;
  r.order.push_back(0);
  r.order.insert(r.order.end(), seq.begin(), seq.end());
  r.order.push_back(0);
  return r;
}

// Exhaustive optimum: every subset within the cardinality cap whose shortest
// tour fits the budget. Guarded at m <= 14. Objective ties (within 1e-12)
// keep the lexicographically smallest location set.
inline SolveReport brute_force_optimum(const Instance& inst) {
  if (inst.m > 14) throw std::invalid_argument("brute_force_optimum: m > 14");
  auto t0 = std::chrono::steady_clock::now();

  SolveReport rep;
  rep.best_x.assign(inst.m, 0.0);
  rep.best_tour = {0, 0};
  rep.objective = 0;
  rep.status = SolveStatus::Optimal;

  std::uint32_t full = std::uint32_t{1} << inst.m;
  std::vector<int> locs, best_locs;
  Vec x(inst.m, 0.0);
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    if (std::popcount(mask) > inst.cap_c) continue;
    locs.clear();
    for (int i = 0; i < inst.m; ++i)
      if (mask >> i & 1) locs.push_back(i);
    TourResult tour = tsp_length(inst, locs);
    if (!inst.fits_budget(tour.length)) continue;
    std::fill(x.begin(), x.end(), 0.0);
    for (int i : locs) x[i] = 1.0;
    double f = eval_objective(inst, x);
    bool better = f > rep.objective + 1e-12;
    bool tie = !better && f > rep.objective - 1e-12 &&
               std::lexicographical_compare(locs.begin(), locs.end(), best_locs.begin(),
                                            best_locs.end());
    if (better || tie) {
      rep.objective = f;
      rep.best_x = x;
      rep.best_tour = tour.order;
      best_locs = locs;
    }
  }
  rep.bound = rep.objective;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Five locations in two clusters around the depot: {1,2} reachable within the
// budget, {3,4,5} reachable within the budget, but every tour mixing the two
// exceeds it (cross-cluster times dwarf t_max). With cap_c = 3 the feasible
// sets violate the matroid exchange axiom, e.g. between {1,2} and {3,4,5}.
inline Instance two_cluster_fixture() {
  Instance inst;
  inst.name = "two-cluster";
  inst.m = 5;
  inst.cap_c = 3;
  inst.t_max = 21;
  inst.travel = TravelMatrix(6);
  auto set = [&](int i, int j, double v) {
    inst.travel.at(i, j) = v;
    inst.travel.at(j, i) = v;
  };
  // cluster A = nodes {1,2}, cluster B = nodes {3,4,5}
  set(0, 1, 5);
  set(0, 2, 5);
  set(1, 2, 1);
  for (int b = 3; b <= 5; ++b) set(0, b, 6);
  set(3, 4, 1);
  set(3, 5, 1);
  set(4, 5, 1);
  for (int a = 1; a <= 2; ++a)
    for (int b = 3; b <= 5; ++b) set(a, b, 1000);

  inst.zones.resize(2);
  inst.zones[0] = {1.0, 1.0, {2, 2, 3, 3, 3}};
  inst.zones[1] = {1.0, 1.0, {1, 1, 2, 2, 2}};
  inst.validate();
  return inst;
}

}  // namespace mcpr
