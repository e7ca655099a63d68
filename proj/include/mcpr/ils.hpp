#pragma once

// Iterated local search for the routing-constrained capture problem.
//
// A solution is a depot-anchored route over a subset of locations. The
// search alternates construction, route-shortening moves (2-Opt, Or-Opt),
// objective moves screened by the first-order surrogate (Replace-1 swaps one
// visited location, Replace-2 trades one for an adjacent pair), perturbation
// by one of three removal schemes, and greedy refill. Every applied mutation
// is followed by a from-scratch cache refresh, so objective values are
// bit-reproducible for a given seed.

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mcpr/instance.hpp"
#include "mcpr/objective.hpp"
#include "mcpr/report.hpp"
#include "mcpr/rng.hpp"

namespace mcpr {

struct IlsConfig {
  int nb_iter = 10000;
  double time_limit = 3600;  // seconds
  int threshold = 10;        // consecutive non-improvements before restart
  int runs = 20;             // seeds 1..runs in batch use
  std::uint64_t seed = 1;
  std::ostream* trace = nullptr;
};

struct RouteSolution {
  std::vector<int> order;     // node ids [0, ..., 0]; [0, 0] when empty
  std::vector<char> visited;  // by location id
  double length = 0;
  Vec den;                    // per zone: U^c_n + sum of V over visited
  double objective = 0;

  int visit_count() const { return static_cast<int>(order.size()) - 2; }
};

namespace detail {

inline Vec route_selection(const RouteSolution& sol) {
  Vec x(sol.visited.size(), 0.0);
  for (std::size_t i = 0; i < sol.visited.size(); ++i)
    if (sol.visited[i]) x[i] = 1.0;
  return x;
}

// From-scratch recomputation of length, denominators and objective. The
// objective goes through eval_objective so route values compare exactly
// against evaluations of the same selection elsewhere.
inline void route_refresh(const Instance& inst, RouteSolution& sol) {
  sol.length = 0;
  for (std::size_t p = 0; p + 1 < sol.order.size(); ++p)
    sol.length += inst.travel.at(sol.order[p], sol.order[p + 1]);
  Vec x = route_selection(sol);
  sol.den.resize(inst.zone_count());
  for (int n = 0; n < inst.zone_count(); ++n) sol.den[n] = zone_mix(inst.zones[n], x);
  sol.objective = eval_objective(inst, x);
}

inline RouteSolution empty_route(const Instance& inst) {
  RouteSolution sol;
  sol.order = {0, 0};
  sol.visited.assign(inst.m, 0);
  route_refresh(inst, sol);
  return sol;
}

// Exact objective gain of adding location h, one pass over the cached
// denominators.
inline double insertion_gain(const Instance& inst, const RouteSolution& sol, int h) {
  double g = 0;
  for (int n = 0; n < inst.zone_count(); ++n) {
    const Zone& z = inst.zones[n];
    double d = sol.den[n];
    g += z.demand * z.attraction[h] * z.competitor / (d * (d + z.attraction[h]));
  }
  return g;
}

struct InsertionSpot {
  int pos = -1;  // insert before order[pos]
  double delta = std::numeric_limits<double>::infinity();
};

inline InsertionSpot cheapest_insertion(const Instance& inst, const RouteSolution& sol, int h) {
  InsertionSpot spot;
  int node = h + 1;
  for (std::size_t p = 1; p < sol.order.size(); ++p) {
    int a = sol.order[p - 1], b = sol.order[p];
    double delta = inst.travel.at(a, node) + inst.travel.at(node, b) - inst.travel.at(a, b);
    if (delta < spot.delta) {
      spot.delta = delta;
      spot.pos = static_cast<int>(p);
    }
  }
  return spot;
}

inline void apply_insertion(const Instance& inst, RouteSolution& sol, int h,
                            const InsertionSpot& spot) {
  sol.order.insert(sol.order.begin() + spot.pos, h + 1);
  sol.visited[h] = 1;
  route_refresh(inst, sol);
}

struct InsertionCandidate {
  double gain = 0;
  int loc = -1;
  InsertionSpot spot;
};

// All locations that still fit the budget and the cardinality cap, each at
// its cheapest position.
inline std::vector<InsertionCandidate> feasible_insertions(const Instance& inst,
                                                           const RouteSolution& sol) {
  std::vector<InsertionCandidate> cands;
  if (sol.visit_count() >= inst.cap_c) return cands;
  for (int h = 0; h < inst.m; ++h) {
    if (sol.visited[h]) continue;
    InsertionSpot spot = cheapest_insertion(inst, sol, h);
    if (!inst.fits_budget(sol.length + spot.delta)) continue;
    cands.push_back({insertion_gain(inst, sol, h), h, spot});
  }
  return cands;
}

// Greedy insertion to saturation: highest exact gain first, smallest
// location id on ties, each at its cheapest feasible position.
inline RouteSolution greedy_fill(const Instance& inst, RouteSolution sol) {
  while (true) {
    std::vector<InsertionCandidate> cands = feasible_insertions(inst, sol);
    if (cands.empty()) break;
    const InsertionCandidate* best = &cands.front();
    for (const InsertionCandidate& c : cands)
      if (c.gain > best->gain) best = &c;
    apply_insertion(inst, sol, best->loc, best->spot);
  }
  return sol;
}

}  // namespace detail

inline RouteSolution construct(const Instance& inst) {
  return detail::greedy_fill(inst, detail::empty_route(inst));
}

// First-improvement segment reversal until no move shortens the route. The
// visited set and therefore the objective never change.
inline RouteSolution two_opt(const Instance& inst, RouteSolution sol) {
  const double kGain = -1e-12;
  bool improved = true;
  while (improved) {
    improved = false;
    int l = sol.visit_count();
    for (int i = 1; i <= l - 1 && !improved; ++i) {
      for (int j = i + 1; j <= l && !improved; ++j) {
        int a = sol.order[i - 1], u = sol.order[i];
        int v = sol.order[j], b = sol.order[j + 1];
        double delta = inst.travel.at(a, v) + inst.travel.at(u, b) - inst.travel.at(a, u) -
                       inst.travel.at(v, b);
        if (delta < kGain) {
          std::reverse(sol.order.begin() + i, sol.order.begin() + j + 1);
          detail::route_refresh(inst, sol);
          improved = true;
        }
      }
    }
  }
  return sol;
}

// First-improvement relocation of segments of one to three consecutive
// visits, orientation preserved.
inline RouteSolution or_opt(const Instance& inst, RouteSolution sol) {
  const double kGain = -1e-12;
  bool improved = true;
  while (improved) {
    improved = false;
    int l = sol.visit_count();
    for (int seg = 1; seg <= 3 && !improved; ++seg) {
      if (l < seg + 1) break;  // nothing left to relocate around
      for (int i = 1; i + seg - 1 <= l && !improved; ++i) {
        int a = sol.order[i - 1], s1 = sol.order[i];
        int s2 = sol.order[i + seg - 1], b = sol.order[i + seg];
        double removal = inst.travel.at(a, s1) + inst.travel.at(s2, b) - inst.travel.at(a, b);
        std::vector<int> rest;
        rest.reserve(sol.order.size() - seg);
        rest.insert(rest.end(), sol.order.begin(), sol.order.begin() + i);
        rest.insert(rest.end(), sol.order.begin() + i + seg, sol.order.end());
        for (std::size_t q = 1; q < rest.size() && !improved; ++q) {
          if (static_cast<int>(q) == i) continue;  // same place, no move
          int c = rest[q - 1], d = rest[q];
          double addition = inst.travel.at(c, s1) + inst.travel.at(s2, d) - inst.travel.at(c, d);
          if (addition - removal < kGain) {
            std::vector<int> next(rest.begin(), rest.begin() + q);
            next.insert(next.end(), sol.order.begin() + i, sol.order.begin() + i + seg);
            next.insert(next.end(), rest.begin() + q, rest.end());
            sol.order = std::move(next);
            detail::route_refresh(inst, sol);
            improved = true;
          }
        }
      }
    }
  }
  return sol;
}

// Swap one visited location for one unvisited location, screened by the
// stored first-order coefficients: only the pair maximizing the surrogate
// margin is examined each round, and it must pass the margin, budget and
// exact-objective tests or the operator stops. The incoming location takes
// exactly the leaving one's position.
inline RouteSolution replace_1(const Instance& inst, RouteSolution sol, TaylorCoefficients& tc) {
  while (true) {
    int l = sol.visit_count();
    if (l == 0 || l == inst.m) break;
    int h = -1, k = -1;
    for (int i = 0; i < inst.m; ++i) {
      if (sol.visited[i]) {
        if (k < 0 || tc.coeff[i] < tc.coeff[k]) k = i;
      } else {
        if (h < 0 || tc.coeff[i] > tc.coeff[h]) h = i;
      }
    }
    if (!(tc.coeff[h] - tc.coeff[k] > 0)) break;
    int p = -1;
    for (std::size_t q = 1; q + 1 < sol.order.size(); ++q)
      if (sol.order[q] == k + 1) p = static_cast<int>(q);
    int prev = sol.order[p - 1], next = sol.order[p + 1];
    double delta = inst.travel.at(prev, h + 1) + inst.travel.at(next, h + 1) -
                   inst.travel.at(prev, k + 1) - inst.travel.at(next, k + 1);
    if (!inst.fits_budget(sol.length + delta)) break;
    Vec x = detail::route_selection(sol);
    x[k] = 0.0;
    x[h] = 1.0;
    double exact = eval_objective(inst, x);
    if (!(exact > sol.objective)) break;
    sol.order[p] = h + 1;
    sol.visited[k] = 0;
    sol.visited[h] = 1;
    detail::route_refresh(inst, sol);
    std::vector<int> set;
    for (int i = 0; i < inst.m; ++i)
      if (sol.visited[i]) set.push_back(i);
    tc = taylor_coefficients(inst, set);
  }
  return sol;
}

// Replace one visited location j by a pair of unvisited locations inserted
// in its position, orientation chosen by the cheaper attachment. Screening
// picks the two largest coefficients against the smallest visited one;
// requires room under the cardinality cap and passes budget plus exact
// re-check, else stops.
inline RouteSolution replace_2(const Instance& inst, RouteSolution sol, TaylorCoefficients& tc) {
  while (true) {
    int l = sol.visit_count();
    if (l == 0 || l + 1 > inst.cap_c || inst.m - l < 2) break;
    int a = -1, b = -1, j = -1;
    for (int i = 0; i < inst.m; ++i) {
      if (sol.visited[i]) {
        if (j < 0 || tc.coeff[i] < tc.coeff[j]) j = i;
      } else if (a < 0 || tc.coeff[i] > tc.coeff[a]) {
        b = a;
        a = i;
      } else if (b < 0 || tc.coeff[i] > tc.coeff[b]) {
        b = i;
      }
    }
    if (a > b) std::swap(a, b);  // scanned order: smaller id first
    if (!(tc.coeff[a] + tc.coeff[b] - tc.coeff[j] > 0)) break;
    int p = -1;
    for (std::size_t q = 1; q + 1 < sol.order.size(); ++q)
      if (sol.order[q] == j + 1) p = static_cast<int>(q);
    int prev = sol.order[p - 1], next = sol.order[p + 1];
    int first = a, second = b;
    if (inst.travel.at(prev, b + 1) + inst.travel.at(next, a + 1) <
        inst.travel.at(prev, a + 1) + inst.travel.at(next, b + 1)) {
      first = b;
      second = a;
    }
    double delta = inst.travel.at(prev, first + 1) + inst.travel.at(first + 1, second + 1) +
                   inst.travel.at(second + 1, next) - inst.travel.at(prev, j + 1) -
                   inst.travel.at(j + 1, next);
    if (!inst.fits_budget(sol.length + delta)) break;
    Vec x = detail::route_selection(sol);
    x[j] = 0.0;
    x[a] = 1.0;
    x[b] = 1.0;
    double exact = eval_objective(inst, x);
    if (!(exact > sol.objective)) break;
    sol.order[p] = first + 1;
    sol.order.insert(sol.order.begin() + p + 1, second + 1);
    sol.visited[j] = 0;
    sol.visited[a] = 1;
    sol.visited[b] = 1;
    detail::route_refresh(inst, sol);
    std::vector<int> set;
    for (int i = 0; i < inst.m; ++i)
      if (sol.visited[i]) set.push_back(i);
    tc = taylor_coefficients(inst, set);
  }
  return sol;
}

// Full pipeline: shorten, run both replace moves to a fixpoint, shorten
// again (replacements may have degraded the route geometry), then fill any
// remaining slack greedily.
inline RouteSolution local_search(const Instance& inst, RouteSolution sol) {
  sol = two_opt(inst, std::move(sol));
  sol = or_opt(inst, std::move(sol));
  std::vector<int> set;
  for (int i = 0; i < inst.m; ++i)
    if (sol.visited[i]) set.push_back(i);
  TaylorCoefficients tc = taylor_coefficients(inst, set);
  while (true) {
    double before = sol.objective;
    sol = replace_1(inst, std::move(sol), tc);
    sol = replace_2(inst, std::move(sol), tc);
    if (!(sol.objective > before)) break;
  }
  sol = two_opt(inst, std::move(sol));
  sol = or_opt(inst, std::move(sol));
  return detail::greedy_fill(inst, std::move(sol));
}

// Removes a seed-dependent batch of visits by one of three schemes (chosen
// uniformly), then refills with a randomized greedy: among the top three
// gains, one candidate is drawn uniformly. `removal_freq` persists across a
// run and counts how often each location has been removed by any scheme;
// the historical scheme removes the least-removed visits first. When
// `op_used` is given it receives the scheme name.
inline RouteSolution perturb(const Instance& inst, RouteSolution sol, Rng& rng,
                             std::vector<int>& removal_freq, std::string* op_used = nullptr) {
  int l = sol.visit_count();
  std::string op = "rebuild";
  if (l >= 1) {
    int which = static_cast<int>(rng.uniform_int(0, 2));
    int lo = std::max(1, (l + 2) / 3);
    int hi = std::max(lo, l / 2);
    int r = static_cast<int>(rng.uniform_int(lo, hi));
    std::vector<int> positions;  // positions in order, 1..l
    if (which == 0) {
      op = "random";
      std::vector<int> pool(l);
      std::iota(pool.begin(), pool.end(), 1);
      for (int t = 0; t < r; ++t) {
        int j = t + static_cast<int>(rng.uniform_int(0, l - 1 - t));
        std::swap(pool[t], pool[j]);
        positions.push_back(pool[t]);
      }
    } else if (which == 1) {
      op = "historical";
      std::vector<int> locs;
      for (int i = 0; i < inst.m; ++i)
        if (sol.visited[i]) locs.push_back(i);
      std::sort(locs.begin(), locs.end(), [&](int x, int y) {
        if (removal_freq[x] != removal_freq[y]) return removal_freq[x] < removal_freq[y];
        return x < y;
      });
      locs.resize(r);
      for (int loc : locs)
        for (int q = 1; q <= l; ++q)
          if (sol.order[q] == loc + 1) positions.push_back(q);
    } else {
      op = "string";
      int start = static_cast<int>(rng.uniform_int(1, l - r + 1));
      for (int q = start; q < start + r; ++q) positions.push_back(q);
    }
    std::sort(positions.begin(), positions.end());
    for (std::size_t t = positions.size(); t-- > 0;) {
      int q = positions[t];
      int loc = sol.order[q] - 1;
      sol.order.erase(sol.order.begin() + q);
      sol.visited[loc] = 0;
      ++removal_freq[loc];
    }
    detail::route_refresh(inst, sol);
  }
  while (true) {
    std::vector<detail::InsertionCandidate> cands = detail::feasible_insertions(inst, sol);
    if (cands.empty()) break;
    std::sort(cands.begin(), cands.end(),
              [](const detail::InsertionCandidate& x, const detail::InsertionCandidate& y) {
                if (x.gain != y.gain) return x.gain > y.gain;
                return x.loc < y.loc;
              });
    int top = std::min<int>(3, static_cast<int>(cands.size()));
    const detail::InsertionCandidate& pick = cands[rng.uniform_int(0, top - 1)];
    detail::apply_insertion(inst, sol, pick.loc, pick.spot);
  }
  if (op_used) *op_used = op;
  return sol;
}

// Construction, local search, then nb_iter rounds of perturb + local search
// with best-solution restart after `threshold` consecutive non-improving
// rounds. Deterministic per seed; the report never claims optimality.
inline SolveReport ils_run(const Instance& inst, const IlsConfig& cfg, std::uint64_t seed) {
  detail::Stopwatch watch;
  Rng rng(seed);
  std::vector<int> removal_freq(inst.m, 0);

  if (cfg.trace) *cfg.trace << "iteration,current_f,best_f,operator\n";

  RouteSolution cur = local_search(inst, construct(inst));
  RouteSolution best = cur;
  int nb_imp = 1;
  int iterations = 0;
  for (int iter = 1; iter <= cfg.nb_iter; ++iter) {
    if (watch.seconds() > cfg.time_limit) break;
    std::string op;
    cur = perturb(inst, std::move(cur), rng, removal_freq, &op);
    cur = local_search(inst, std::move(cur));
    if (cur.objective > best.objective) {
      best = cur;
      nb_imp = 1;
    } else {
      ++nb_imp;
      if (nb_imp % cfg.threshold == 0) cur = best;
    }
    iterations = iter;
    if (cfg.trace)
      *cfg.trace << iter << ',' << detail::fmt17(cur.objective) << ','
                 << detail::fmt17(best.objective) << ',' << op << '\n';
  }

  SolveReport rep;
  rep.best_x = detail::route_selection(best);
  rep.best_tour = best.order;
  rep.objective = best.objective;
  rep.bound = inst.total_demand();
  rep.status = SolveStatus::Feasible;
  rep.counters.outer_iters = iterations;
  rep.wall_time_s = watch.seconds();
  return rep;
}

}  // namespace mcpr
