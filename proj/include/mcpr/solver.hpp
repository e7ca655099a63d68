#pragma once

// Exact methods. All three share the same desk-scale master backend idea:
// candidate selections are enumerated best-first by their cut-pool upper
// bound, and the routing side is resolved per candidate.
//
//   nested_cutting_plane   outer loop of objective cuts, inner loop of
//                          subtour cuts, re-solving the master each round
//   nested_branch_and_cut  one search tree; subtour and objective cuts are
//                          applied lazily when a candidate is reached
//   cp_mtz                 objective cuts as above, but routing feasibility
//                          is decided directly by the exact tour oracle, so
//                          no subtour rounds exist
//
// The backend is exponential by design (it replaces an external MIP solver
// at small scale) and refuses instances above a configurable size guard.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcpr/cuts.hpp"
#include "mcpr/instance.hpp"
#include "mcpr/objective.hpp"
#include "mcpr/oracle.hpp"
#include "mcpr/report.hpp"

namespace mcpr {

enum class SecVariant { Sec1, Sec2, Both };

struct SolveConfig {
  double epsilon = 1e-6;    // per-group and aggregate optimality tolerance
  int groups = 20;          // requested number of zone groups L
  double time_limit = 3600; // seconds, checked at iteration boundaries
  SecVariant sec = SecVariant::Both;
  bool relative_eps = false; // scale the per-group test by max(1, |Psi_l|)
  int backend_guard = 24;    // largest m the enumeration backend accepts
  std::ostream* trace = nullptr;
};

// Group-wise upper bound the master assigns to a binary selection: the
// demand seed min-ed with every pooled objective cut of that group.
inline std::vector<double> theta_upper_bound(const CutPool& pool, const GroupPartition& part,
                                             const Instance& inst, std::span<const double> x) {
  std::vector<double> theta(part.size());
  for (std::size_t l = 0; l < part.size(); ++l) {
    double v = 0;
    for (int n : part[l]) v += inst.zones[n].demand;
    for (const LinearCut& cut : pool.group_cuts(static_cast<int>(l)))
      v = std::min(v, cut.value_at(x));
    theta[l] = v;
  }
  return theta;
}

namespace detail {

inline void check_backend_guard(int m, int guard) {
  int eff = std::min(guard, 30);  // selection masks are 32-bit
  if (m > eff)
    throw std::invalid_argument("master backend: m = " + std::to_string(m) +
                                " exceeds the enumeration guard (" + std::to_string(eff) + ")");
}

inline Vec selection_of(std::uint32_t mask, int m) {
  Vec x(m, 0.0);
  for (int i = 0; i < m; ++i)
    if (mask >> i & 1) x[i] = 1.0;
  return x;
}

// Bit i of the mask is location i+1; reversing the bits makes "larger key"
// mean "lexicographically larger selection vector".
inline std::uint32_t reverse_key(std::uint32_t mask, int m) {
  std::uint32_t r = 0;
  for (int i = 0; i < m; ++i)
    if (mask >> i & 1) r |= std::uint32_t{1} << (m - 1 - i);
  return r;
}

// Objective gradient of the full capture function at the empty selection;
// used to pick the anchor of the single crossing-degree cut in Both mode.
inline double gradient_at_zero(const Instance& inst, int loc) {
  double g = 0;
  for (const Zone& z : inst.zones) g += z.demand * z.attraction[loc] / z.competitor;
  return g;
}

// Subtour cuts for one depot-free component. Sec1 yields one cut per member
// node; Both pairs the single set-size cut with one crossing cut anchored at
// the component's steepest location (smallest id on ties).
inline std::vector<RoutingCut> component_cuts(const Instance& inst, const std::vector<int>& comp,
                                              SecVariant variant) {
  if (variant == SecVariant::Sec1) return sec_cuts(comp, SecKind::Sec1);
  if (variant == SecVariant::Sec2) return sec_cuts(comp, SecKind::Sec2);
  std::vector<RoutingCut> cuts = sec_cuts(comp, SecKind::Sec2);
  int anchor = comp.front();
  double best = -std::numeric_limits<double>::infinity();
  for (int v : comp) {
    double g = gradient_at_zero(inst, v - 1);
    if (g > best) {
      best = g;
      anchor = v;
    }
  }
  std::vector<int> nodes(comp);
  std::sort(nodes.begin(), nodes.end());
  cuts.push_back({SecKind::Sec1, nodes, anchor});
  return cuts;
}

// Searches for the lexicographically smallest binary edge set on the active
// nodes meeting degree two everywhere, the budget row, and every pooled
// subtour cut. Selections of size <= 2 use the closed-form tours (degree-two
// binary edges cannot encode them; the out-and-back edge carries value 2).
// On success y_out holds the edges and tour_out the node order when the
// edges form one tour (empty when subtours remain).
inline bool routing_feasible(const Instance& inst, const CutPool& pool, std::uint32_t mask,
                             EdgeVector& y_out, std::vector<int>& tour_out) {
  const int m = inst.m;
  y_out = EdgeVector(m + 1);
  tour_out.clear();

  std::vector<int> sel;
  for (int i = 0; i < m; ++i)
    if (mask >> i & 1) sel.push_back(i + 1);

  if (sel.empty()) {
    tour_out = {0, 0};
    return inst.fits_budget(0.0);
  }
  if (sel.size() == 1) {
    int k = sel[0];
    if (!inst.fits_budget(2 * inst.depot_time(k - 1))) return false;
    y_out.set(0, k, 2);
    tour_out = {0, k, 0};
    return true;
  }
  if (sel.size() == 2) {
    int a = sel[0], b = sel[1];
    double len = inst.depot_time(a - 1) + inst.time(a - 1, b - 1) + inst.depot_time(b - 1);
    if (!inst.fits_budget(len)) return false;
    y_out.set(0, a, 1);
    y_out.set(a, b, 1);
    y_out.set(0, b, 1);
    tour_out = {0, a, b, 0};
    return true;
  }

  std::vector<int> act;
  act.push_back(0);
  act.insert(act.end(), sel.begin(), sel.end());
  const int k = static_cast<int>(act.size());

  struct ActiveEdge {
    int u, v;
    double cost;
  };
  std::vector<ActiveEdge> edges;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      edges.push_back({act[a], act[b], inst.travel.at(act[a], act[b])});
  const int ne = static_cast<int>(edges.size());

  // cheapest incident cost per active node, for the completion lower bound
  std::vector<double> min_cost(k, std::numeric_limits<double>::infinity());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) min_cost[a] = std::min(min_cost[a], inst.travel.at(act[a], act[b]));

  std::vector<int> pos_of(m + 1, -1);  // node id -> position in act
  for (int a = 0; a < k; ++a) pos_of[act[a]] = a;

  // pooled set-size cuts become running counters; crossing cuts are checked
  // at the leaves
  struct SizeCut {
    std::uint32_t members = 0;  // bit i = node i+1
    int size = 0;
    int rhs = 0;
    int internal = 0;
  };
  std::vector<SizeCut> size_cuts;
  std::vector<const RoutingCut*> cross_cuts;
  for (const RoutingCut& c : pool.routing_cuts()) {
    if (c.kind == SecKind::Sec1) {
      cross_cuts.push_back(&c);
      continue;
    }
    SizeCut sc;
    sc.size = static_cast<int>(c.nodes.size());
    int selected = 0;
    for (int v : c.nodes) {
      sc.members |= std::uint32_t{1} << (v - 1);
      if (mask >> (v - 1) & 1) ++selected;
    }
    sc.rhs = (sc.size - 1) * selected;
    size_cuts.push_back(sc);
  }

  Vec xvec = selection_of(mask, m);
  std::vector<int> deg(k, 0);
  std::vector<int> rem(k, k - 1);
  const double cap = inst.t_max + kBudgetEps;

  struct Dfs {
    const Instance& inst;
    const std::vector<ActiveEdge>& edges;
    const std::vector<double>& min_cost;
    const std::vector<int>& pos_of;
    std::vector<SizeCut>& size_cuts;
    const std::vector<const RoutingCut*>& cross_cuts;
    const Vec& xvec;
    EdgeVector& y;
    std::vector<int>& deg;
    std::vector<int>& rem;
    double cap;
    int k, ne;
    double len = 0;

    bool bound_ok() const {
      double lb = 0;
      for (int a = 0; a < k; ++a) lb += (2 - deg[a]) * min_cost[a];
      return len + lb / 2 <= cap;
    }

    bool go(int idx) {
      if (idx == ne) {
        for (const RoutingCut* c : cross_cuts)
          if (!routing_cut_satisfied(*c, xvec, y)) return false;
        return true;
      }
      const ActiveEdge& e = edges[idx];
      int pu = pos_of[e.u], pv = pos_of[e.v];
      --rem[pu];
      --rem[pv];
      // zero first: the first full assignment found is the smallest
      if (deg[pu] + rem[pu] >= 2 && deg[pv] + rem[pv] >= 2 && go(idx + 1)) return true;
      bool one_ok = deg[pu] < 2 && deg[pv] < 2 && len + e.cost <= cap;
      if (one_ok && e.u != 0 && e.v != 0) {
        for (SizeCut& sc : size_cuts) {
          std::uint32_t bits =
              (std::uint32_t{1} << (e.u - 1)) | (std::uint32_t{1} << (e.v - 1));
          if ((sc.members & bits) != bits) continue;
          if (sc.size * (sc.internal + 1) > sc.rhs) {
            one_ok = false;
            break;
          }
        }
      }
      if (one_ok) {
        ++deg[pu];
        ++deg[pv];
        len += e.cost;
        y.set(e.u, e.v, 1);
        if (e.u != 0 && e.v != 0)
          for (SizeCut& sc : size_cuts) {
            std::uint32_t bits =
                (std::uint32_t{1} << (e.u - 1)) | (std::uint32_t{1} << (e.v - 1));
            if ((sc.members & bits) == bits) ++sc.internal;
          }
        if (bound_ok() && go(idx + 1)) return true;
        y.set(e.u, e.v, 0);
        len -= e.cost;
        --deg[pu];
        --deg[pv];
        if (e.u != 0 && e.v != 0)
          for (SizeCut& sc : size_cuts) {
            std::uint32_t bits =
                (std::uint32_t{1} << (e.u - 1)) | (std::uint32_t{1} << (e.v - 1));
            if ((sc.members & bits) == bits) --sc.internal;
          }
      }
      ++rem[pu];
      ++rem[pv];
      return false;
    }
  };

  Dfs dfs{inst,  edges, min_cost, pos_of, size_cuts, cross_cuts, xvec,
          y_out, deg,   rem,      cap,    k,         ne};
  if (!dfs.bound_ok() || !dfs.go(0)) return false;

  // single connected tour? then extract the node order, depot first, second
  // node the smaller depot neighbour
  std::vector<std::vector<int>> comps = find_subtours(xvec, y_out);
  if (comps.size() == 1) {
    tour_out.push_back(0);
    int prev = -1, cur = 0;
    do {
      int next = -1;
      for (int node : act)
        if (node != cur && node != prev && y_out.at(cur, node)) {
          next = node;
          break;
        }
      tour_out.push_back(next);
      prev = cur;
      cur = next;
    } while (cur != 0);
  }
  return true;
}

// Per-group theta values for every selection mask, kept current against the
// pool by a watermark per group. Falls back to direct evaluation above the
// table size cap.
class ThetaTable {
 public:
  ThetaTable(const Instance& inst, const GroupPartition& part, const CutPool& pool)
      : inst_(inst), part_(part), pool_(pool), groups_(static_cast<int>(part.size())) {
    seeds_.resize(groups_, 0.0);
    for (int l = 0; l < groups_; ++l)
      for (int n : part_[l]) seeds_[l] += inst.zones[n].demand;
    use_table_ = inst.m <= 16;
    if (use_table_) {
      masks_ = std::uint32_t{1} << inst.m;
      table_.resize(static_cast<std::size_t>(masks_) * groups_);
      for (std::uint32_t mask = 0; mask < masks_; ++mask)
        for (int l = 0; l < groups_; ++l) table_[std::size_t{mask} * groups_ + l] = seeds_[l];
      scratch_.resize(masks_);
    }
    watermark_.assign(groups_, 0);
  }

  void refresh() {
    if (!use_table_) return;
    for (int l = 0; l < groups_; ++l) {
      const std::vector<LinearCut>& cuts = pool_.group_cuts(l);
      for (std::size_t c = watermark_[l]; c < cuts.size(); ++c) {
        const LinearCut& cut = cuts[c];
        // subset-sum pass; addition order equals ascending location index,
        // so values match LinearCut::value_at bit for bit
        scratch_[0] = cut.beta;
        for (std::uint32_t mask = 1; mask < masks_; ++mask) {
          int i = std::countr_zero(mask);
          scratch_[mask] = scratch_[mask & (mask - 1)] + cut.alpha[i];
        }
        for (std::uint32_t mask = 0; mask < masks_; ++mask) {
          double& t = table_[std::size_t{mask} * groups_ + l];
          t = std::min(t, scratch_[mask]);
        }
      }
      watermark_[l] = cuts.size();
    }
  }

  std::vector<double> row(std::uint32_t mask) const {
    if (!use_table_)
      return theta_upper_bound(pool_, part_, inst_, selection_of(mask, inst_.m));
    std::vector<double> r(groups_);
    for (int l = 0; l < groups_; ++l) r[l] = table_[std::size_t{mask} * groups_ + l];
    return r;
  }

  double sum(std::uint32_t mask) const {
    if (!use_table_) {
      std::vector<double> r = row(mask);
      double s = 0;
      for (double v : r) s += v;
      return s;
    }
    double s = 0;
    for (int l = 0; l < groups_; ++l) s += table_[std::size_t{mask} * groups_ + l];
    return s;
  }

 private:
  const Instance& inst_;
  const GroupPartition& part_;
  const CutPool& pool_;
  int groups_;
  bool use_table_ = false;
  std::uint32_t masks_ = 0;
  std::vector<double> seeds_;
  std::vector<double> table_;
  std::vector<double> scratch_;
  std::vector<std::size_t> watermark_;
};

}  // namespace detail

struct MasterSolution {
  std::uint32_t mask = 0;
  Vec x;
  EdgeVector y;
  std::vector<int> tour;  // [0, ..., 0] for a single tour, empty otherwise
  std::vector<double> theta;
  double sum_theta = 0;
};

// Exact maximizer of sum(theta) over selections within the cardinality cap
// whose routing side admits a degree-two edge set inside the budget and the
// pooled subtour cuts. Best-first over masks; ties prefer the
// lexicographically larger selection, and the edge search yields the
// lexicographically smallest edge set. Masks proven routing-infeasible stay
// excluded for the lifetime of the object (the pool only ever grows, so
// infeasibility is permanent).
class EnumerationMaster {
 public:
  EnumerationMaster(const Instance& inst, const GroupPartition& part, const CutPool& pool,
                    int guard)
      : inst_(inst), pool_(pool), theta_(inst, part, pool) {
    detail::check_backend_guard(inst.m, guard);
    infeasible_.assign(std::size_t{1} << inst.m, 0);
  }

  MasterSolution solve() {
    theta_.refresh();
    const std::uint32_t masks = std::uint32_t{1} << inst_.m;
    std::vector<std::uint32_t> order;
    order.reserve(masks);
    std::vector<double> score(masks, 0.0);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      if (std::popcount(mask) > inst_.cap_c || infeasible_[mask]) continue;
      score[mask] = theta_.sum(mask);
      order.push_back(mask);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return detail::reverse_key(a, inst_.m) > detail::reverse_key(b, inst_.m);
    });
    for (std::uint32_t mask : order) {
      MasterSolution sol;
      if (!detail::routing_feasible(inst_, pool_, mask, sol.y, sol.tour)) {
        infeasible_[mask] = 1;
        continue;
      }
      sol.mask = mask;
      sol.x = detail::selection_of(mask, inst_.m);
      sol.theta = theta_.row(mask);
      sol.sum_theta = 0;
      for (double v : sol.theta) sol.sum_theta += v;
      return sol;
    }
    throw std::logic_error("master backend: no feasible selection (the depot-only tour should always fit)");
  }

 private:
  const Instance& inst_;
  const CutPool& pool_;
  detail::ThetaTable theta_;
  std::vector<char> infeasible_;
};

// One-shot form of the master solve, for callers without iteration state.
inline MasterSolution solve_master(const Instance& inst, const GroupPartition& part,
                                   const CutPool& pool, const SolveConfig& cfg) {
  return EnumerationMaster(inst, part, pool, cfg.backend_guard).solve();
}

namespace detail {

struct GapTest {
  bool stop = false;
  std::vector<int> targets;  // groups to cut when not stopping
};

// Stopping rule: every group bound within its tolerance of the true group
// value AND the aggregate bound within epsilon of f(x). When only the
// aggregate test fails, every group with positive slack is cut; otherwise
// the violating groups are.
inline GapTest stopping_test(const Instance& inst, const GroupPartition& part,
                             const SolveConfig& cfg, std::span<const double> x,
                             const std::vector<double>& theta, double sum_theta, double fbar) {
  std::vector<int> violated, positive;
  for (int l = 0; l < static_cast<int>(part.size()); ++l) {
    double psi = eval_group(inst, part, l, x);
    double gap = theta[l] - psi;
    double tol = cfg.relative_eps ? cfg.epsilon * std::max(1.0, std::fabs(psi)) : cfg.epsilon;
    if (gap > tol) violated.push_back(l);
    if (gap > 0) positive.push_back(l);
  }
  if (violated.empty() && sum_theta - fbar <= cfg.epsilon) return {true, {}};
  return {false, violated.empty() ? positive : violated};
}

inline int add_objective_cuts(const Instance& inst, const GroupPartition& part, CutPool& pool,
                              const std::vector<int>& targets, std::span<const double> x,
                              SolveCounters& counters) {
  int added = 0;
  for (int l : targets) {
    if (pool.add(oa_cut(inst, part, l, x))) ++counters.cuts_oa, ++added;
    if (pool.add(submodular_cut_1(inst, part, l, x))) ++counters.cuts_sub1, ++added;
    if (pool.add(submodular_cut_2(inst, part, l, x))) ++counters.cuts_sub2, ++added;
  }
  return added;
}

inline int add_component_cuts(const Instance& inst, const std::vector<std::vector<int>>& comps,
                              SecVariant variant, CutPool& pool, SolveCounters& counters) {
  int added = 0;
  for (const std::vector<int>& comp : comps) {
    if (comp.front() == 0) continue;  // the depot-side component is kept
    for (const RoutingCut& c : component_cuts(inst, comp, variant)) {
      if (!pool.add(c)) continue;
      ++added;
      ++(c.kind == SecKind::Sec1 ? counters.cuts_sec1 : counters.cuts_sec2);
    }
  }
  return added;
}

inline void trace_header(std::ostream* out) {
  if (out) *out << "iteration,sum_theta,f_xbar,cuts_added,sec_rounds\n";
}

inline void trace_line(std::ostream* out, int iter, double sum_theta, double fbar, int added,
                       int sec) {
  if (out)
    *out << iter << ',' << fmt17(sum_theta) << ',' << fmt17(fbar) << ',' << added << ',' << sec
         << '\n';
}

}  // namespace detail

// Outer loop of objective cuts with an inner subtour-cut loop, both running
// against the enumeration master. Terminates with a matching bound or the
// time limit; the reported objective always belongs to the best valid-tour
// candidate actually evaluated.
inline SolveReport nested_cutting_plane(const Instance& inst, const SolveConfig& cfg) {
  detail::Stopwatch watch;
  GroupPartition part = partition_zones(inst, cfg.groups);
  CutPool pool(static_cast<int>(part.size()));
  EnumerationMaster master(inst, part, pool, cfg.backend_guard);

  SolveReport rep;
  rep.best_x.assign(inst.m, 0.0);
  rep.best_tour = {0, 0};
  rep.objective = 0;
  rep.bound = inst.total_demand();
  detail::trace_header(cfg.trace);

  std::set<std::uint32_t> anchors;
  while (true) {
    MasterSolution sol = master.solve();
    ++rep.counters.master_solves;
    int sec_this = 0;
    while (sol.tour.empty()) {  // the master found a two-cycle cover, not a tour
      std::vector<std::vector<int>> comps = find_subtours(sol.x, sol.y);
      detail::add_component_cuts(inst, comps, cfg.sec, pool, rep.counters);
      ++rep.counters.sec_rounds;
      ++sec_this;
      if (watch.seconds() > cfg.time_limit) {
        rep.bound = sol.sum_theta;
        rep.status = SolveStatus::TimeLimit;
        rep.wall_time_s = watch.seconds();
        return rep;
      }
      sol = master.solve();
      ++rep.counters.master_solves;
    }
    ++rep.counters.outer_iters;
    double fbar = eval_objective(inst, sol.x);
    if (fbar > rep.objective) {
      rep.objective = fbar;
      rep.best_x = sol.x;
      rep.best_tour = sol.tour;
    }
    detail::GapTest gt = detail::stopping_test(inst, part, cfg, sol.x, sol.theta, sol.sum_theta, fbar);
    int added = 0;
    if (!gt.stop) {
      if (anchors.count(sol.mask))
        throw std::logic_error("cutting plane revisited a candidate without stopping");
      anchors.insert(sol.mask);
      added = detail::add_objective_cuts(inst, part, pool, gt.targets, sol.x, rep.counters);
    }
    detail::trace_line(cfg.trace, rep.counters.outer_iters, sol.sum_theta, fbar, added, sec_this);
    if (gt.stop) {
      rep.bound = sol.sum_theta;
      rep.status = SolveStatus::Optimal;
      break;
    }
    if (watch.seconds() > cfg.time_limit) {
      rep.bound = sol.sum_theta;
      rep.status = SolveStatus::TimeLimit;
      break;
    }
  }
  rep.wall_time_s = watch.seconds();
  return rep;
}

// Single-tree variant: one priority queue over selections ordered by their
// current bound; cuts are applied lazily when a candidate is popped. A pop
// whose stored bound went stale is re-queued instead of processed, so the
// popped candidate always carries the globally largest current bound.
inline SolveReport nested_branch_and_cut(const Instance& inst, const SolveConfig& cfg) {
  detail::Stopwatch watch;
  detail::check_backend_guard(inst.m, cfg.backend_guard);
  GroupPartition part = partition_zones(inst, cfg.groups);
  CutPool pool(static_cast<int>(part.size()));

  SolveReport rep;
  rep.best_x.assign(inst.m, 0.0);
  rep.best_tour = {0, 0};
  rep.objective = 0;
  rep.bound = inst.total_demand();
  detail::trace_header(cfg.trace);

  double seed_sum = 0;
  {
    std::vector<double> seeds = theta_upper_bound(pool, part, inst, Vec(inst.m, 0.0));
    // with an empty pool the bound is the seed for every selection
    for (double v : seeds) seed_sum += v;
  }

  struct Node {
    double score;
    std::uint32_t rev;
    std::uint32_t mask;
  };
  auto lower = [](const Node& a, const Node& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.rev < b.rev;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(lower)> tree(lower);
  const std::uint32_t masks = std::uint32_t{1} << inst.m;
  for (std::uint32_t mask = 0; mask < masks; ++mask)
    if (std::popcount(mask) <= inst.cap_c)
      tree.push({seed_sum, detail::reverse_key(mask, inst.m), mask});

  std::set<std::uint32_t> anchors;
  int sec_since_trace = 0;
  while (!tree.empty()) {
    Node nd = tree.top();
    tree.pop();
    ++rep.counters.master_solves;
    if (watch.seconds() > cfg.time_limit) {
      rep.bound = nd.score;
      rep.status = SolveStatus::TimeLimit;
      rep.wall_time_s = watch.seconds();
      return rep;
    }
    Vec x = detail::selection_of(nd.mask, inst.m);
    std::vector<double> theta = theta_upper_bound(pool, part, inst, x);
    double fresh = 0;
    for (double v : theta) fresh += v;
    if (fresh < nd.score) {  // stale bound: re-queue at its current value
      tree.push({fresh, nd.rev, nd.mask});
      continue;
    }
    EdgeVector y;
    std::vector<int> tour;
    if (!detail::routing_feasible(inst, pool, nd.mask, y, tour)) continue;
    if (tour.empty()) {  // two-cycle cover: cut the orphan components and retry
      std::vector<std::vector<int>> comps = find_subtours(x, y);
      detail::add_component_cuts(inst, comps, cfg.sec, pool, rep.counters);
      ++rep.counters.sec_rounds;
      ++sec_since_trace;
      tree.push(nd);  // objective bound unchanged by subtour cuts
      continue;
    }
    ++rep.counters.outer_iters;
    double fbar = eval_objective(inst, x);
    if (fbar > rep.objective) {
      rep.objective = fbar;
      rep.best_x = x;
      rep.best_tour = tour;
    }
    detail::GapTest gt = detail::stopping_test(inst, part, cfg, x, theta, fresh, fbar);
    int added = 0;
    if (!gt.stop) {
      if (anchors.count(nd.mask))
        throw std::logic_error("branch and cut revisited a candidate without stopping");
      anchors.insert(nd.mask);
      added = detail::add_objective_cuts(inst, part, pool, gt.targets, x, rep.counters);
    }
    detail::trace_line(cfg.trace, rep.counters.outer_iters, fresh, fbar, added, sec_since_trace);
    sec_since_trace = 0;
    if (gt.stop) {
      rep.bound = fresh;
      rep.status = SolveStatus::Optimal;
      rep.wall_time_s = watch.seconds();
      return rep;
    }
    std::vector<double> after = theta_upper_bound(pool, part, inst, x);
    double score = 0;
    for (double v : after) score += v;
    tree.push({score, nd.rev, nd.mask});
  }
  throw std::logic_error("branch and cut exhausted the tree without a certificate");
}

// Objective-cut loop where routing feasibility is decided by the exact tour
// oracle instead of subtour cuts; there is no inner loop.
inline SolveReport cp_mtz(const Instance& inst, const SolveConfig& cfg) {
  detail::Stopwatch watch;
  detail::check_backend_guard(inst.m, cfg.backend_guard);
  GroupPartition part = partition_zones(inst, cfg.groups);
  CutPool pool(static_cast<int>(part.size()));
  detail::ThetaTable theta(inst, part, pool);

  SolveReport rep;
  rep.best_x.assign(inst.m, 0.0);
  rep.best_tour = {0, 0};
  rep.objective = 0;
  rep.bound = inst.total_demand();
  detail::trace_header(cfg.trace);

  const std::uint32_t masks = std::uint32_t{1} << inst.m;
  std::vector<char> infeasible(masks, 0);
  std::unordered_map<std::uint32_t, TourResult> tours;

  std::set<std::uint32_t> anchors;
  while (true) {
    theta.refresh();
    std::vector<std::uint32_t> order;
    std::vector<double> score(masks, 0.0);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      if (std::popcount(mask) > inst.cap_c || infeasible[mask]) continue;
      score[mask] = theta.sum(mask);
      order.push_back(mask);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return detail::reverse_key(a, inst.m) > detail::reverse_key(b, inst.m);
    });
    const TourResult* best_tour = nullptr;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask : order) {
      auto it = tours.find(mask);
      if (it == tours.end()) {
        std::vector<int> locs;
        for (int i = 0; i < inst.m; ++i)
          if (mask >> i & 1) locs.push_back(i);
        it = tours.emplace(mask, tsp_length(inst, locs)).first;
      }
      if (!inst.fits_budget(it->second.length)) {
        infeasible[mask] = 1;
        continue;
      }
      best_tour = &it->second;
      best_mask = mask;
      break;
    }
    if (!best_tour)
      throw std::logic_error("tour-oracle master: no feasible selection (the depot-only tour should always fit)");
    ++rep.counters.master_solves;
    ++rep.counters.outer_iters;

    Vec x = detail::selection_of(best_mask, inst.m);
    std::vector<double> th = theta.row(best_mask);
    double sum_theta = theta.sum(best_mask);
    double fbar = eval_objective(inst, x);
    if (fbar > rep.objective) {
      rep.objective = fbar;
      rep.best_x = x;
      rep.best_tour = best_tour->order;
    }
    detail::GapTest gt = detail::stopping_test(inst, part, cfg, x, th, sum_theta, fbar);
    int added = 0;
    if (!gt.stop) {
      if (anchors.count(best_mask))
        throw std::logic_error("tour-oracle cutting plane revisited a candidate without stopping");
      anchors.insert(best_mask);
      added = detail::add_objective_cuts(inst, part, pool, gt.targets, x, rep.counters);
    }
    detail::trace_line(cfg.trace, rep.counters.outer_iters, sum_theta, fbar, added, 0);
    if (gt.stop) {
      rep.bound = sum_theta;
      rep.status = SolveStatus::Optimal;
      break;
    }
    if (watch.seconds() > cfg.time_limit) {
      rep.bound = sum_theta;
      rep.status = SolveStatus::TimeLimit;
      break;
    }
  }
  rep.wall_time_s = watch.seconds();
  return rep;
}

}  // namespace mcpr
