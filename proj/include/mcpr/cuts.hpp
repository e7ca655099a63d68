#pragma once

// Cutting planes for the decomposed capture objective and for subtour
// elimination.
//
// An objective cut for group l is a pair (alpha, beta) with
//     theta_l <= alpha^T x + beta   for every binary x,
// tight at the anchor point it was generated from. Three families:
//
//   * outer approximation at xb:  gradient tangent of the concave Psi_l
//   * submodular form 1 at Sb:    Psi_l(Sb) + sum_{k not in Sb} rho_lk(Sb) x_k
//                                 - sum_{k in Sb} rho_lk([m]-k) (1 - x_k)
//   * submodular form 2 at Sb:    Psi_l(Sb) + sum_{k not in Sb} rho_lk(empty) x_k
//                                 - sum_{k in Sb} rho_lk(Sb-k) (1 - x_k)
//
// Subtour cuts over a node set S (depot excluded, |S| >= 3):
//   SEC-1 (one per anchor k in S):  sum of edges leaving S  >=  2 x_k
//   SEC-2 (single):   |S| * (edges inside S) <= (|S|-1) * sum_{k in S} x_k

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcpr/instance.hpp"
#include "mcpr/objective.hpp"

namespace mcpr {

enum class CutOrigin { OuterApprox, Submodular1, Submodular2 };

struct LinearCut {
  int group = 0;
  Vec alpha;      // length m
  double beta = 0;
  CutOrigin origin = CutOrigin::OuterApprox;
  Vec anchor;     // the point the cut is tight at

  double value_at(std::span<const double> x) const {
    double v = beta;
    for (std::size_t i = 0; i < alpha.size(); ++i) v += alpha[i] * x[i];
    return v;
  }
};

inline LinearCut oa_cut(const Instance& inst, const GroupPartition& part, int l,
                        std::span<const double> xbar) {
  LinearCut cut;
  cut.group = l;
  cut.origin = CutOrigin::OuterApprox;
  cut.anchor.assign(xbar.begin(), xbar.end());
  cut.alpha = group_gradient(inst, part, l, xbar);
  cut.beta = eval_group(inst, part, l, xbar);
  for (int i = 0; i < inst.m; ++i) cut.beta -= cut.alpha[i] * xbar[i];
  return cut;
}

namespace detail {

// Per-zone mix sums for an anchor set, shared by both submodular families.
struct AnchorSums {
  std::vector<char> in_s;  // membership of each location in Sb
  Vec den_s;               // per zone: U^c + sum_{j in Sb} V_j
  Vec den_all;             // per zone: U^c + sum_j V_j
};

inline AnchorSums anchor_sums(const Instance& inst, std::span<const double> xbar) {
  if (static_cast<int>(xbar.size()) != inst.m)
    throw std::invalid_argument("submodular cut: anchor length mismatch");
  AnchorSums a;
  a.in_s.assign(inst.m, 0);
  for (int i = 0; i < inst.m; ++i) a.in_s[i] = xbar[i] > 0.5 ? 1 : 0;
  a.den_s.reserve(inst.zones.size());
  a.den_all.reserve(inst.zones.size());
  for (const Zone& z : inst.zones) {
    double ds = z.competitor, da = z.competitor;
    for (int i = 0; i < inst.m; ++i) {
      da += z.attraction[i];
      if (a.in_s[i]) ds += z.attraction[i];
    }
    a.den_s.push_back(ds);
    a.den_all.push_back(da);
  }
  return a;
}

inline Vec anchor_selection(int m, const std::vector<char>& in_s) {
  Vec x(m, 0.0);
  for (int i = 0; i < m; ++i)
    if (in_s[i]) x[i] = 1.0;
  return x;
}

}  // namespace detail

inline LinearCut submodular_cut_1(const Instance& inst, const GroupPartition& part, int l,
                                  std::span<const double> xbar) {
  detail::AnchorSums a = detail::anchor_sums(inst, xbar);
  LinearCut cut;
  cut.group = l;
  cut.origin = CutOrigin::Submodular1;
  cut.anchor = detail::anchor_selection(inst.m, a.in_s);
  cut.alpha.assign(inst.m, 0.0);
  double psi = 0;
  for (int n : part.at(l)) {
    const Zone& z = inst.zones[n];
    double ds = a.den_s[n], da = a.den_all[n];
    psi += z.demand * (ds - z.competitor) / ds;
    double qu = z.demand * z.competitor;
    for (int i = 0; i < inst.m; ++i) {
      double v = z.attraction[i];
      if (a.in_s[i])
        cut.alpha[i] += qu * v / ((da - v) * da);  // rho_li([m] - i)
      else
        cut.alpha[i] += qu * v / (ds * (ds + v));  // rho_li(Sb)
    }
  }
  cut.beta = psi;
  for (int i = 0; i < inst.m; ++i)
    if (a.in_s[i]) cut.beta -= cut.alpha[i];
  return cut;
}

inline LinearCut submodular_cut_2(const Instance& inst, const GroupPartition& part, int l,
                                  std::span<const double> xbar) {
  detail::AnchorSums a = detail::anchor_sums(inst, xbar);
  LinearCut cut;
  cut.group = l;
  cut.origin = CutOrigin::Submodular2;
  cut.anchor = detail::anchor_selection(inst.m, a.in_s);
  cut.alpha.assign(inst.m, 0.0);
  double psi = 0;
  for (int n : part.at(l)) {
    const Zone& z = inst.zones[n];
    double ds = a.den_s[n];
    psi += z.demand * (ds - z.competitor) / ds;
    double qu = z.demand * z.competitor;
    for (int i = 0; i < inst.m; ++i) {
      double v = z.attraction[i];
      if (a.in_s[i])
        cut.alpha[i] += qu * v / ((ds - v) * ds);  // rho_li(Sb - i)
      else
        cut.alpha[i] += qu * v / (z.competitor * (z.competitor + v));  // rho_li(empty)
    }
  }
  cut.beta = psi;
  for (int i = 0; i < inst.m; ++i)
    if (a.in_s[i]) cut.beta -= cut.alpha[i];
  return cut;
}

// Exhaustive validity check: alpha^T x + beta >= Psi_l(x) on every binary x
// and equality at the anchor. Enumeration, so refused for m > 20.
inline bool check_valid_cut(const Instance& inst, const GroupPartition& part,
                            const LinearCut& cut, double tol = 1e-9) {
  if (inst.m > 20) throw std::invalid_argument("check_valid_cut: m > 20");
  Vec x(inst.m, 0.0);
  std::uint32_t full = std::uint32_t{1} << inst.m;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    for (int i = 0; i < inst.m; ++i) x[i] = (mask >> i & 1) ? 1.0 : 0.0;
    if (cut.value_at(x) < eval_group(inst, part, cut.group, x) - tol) return false;
  }
  double at_anchor = cut.value_at(cut.anchor);
  double psi_anchor = eval_group(inst, part, cut.group, cut.anchor);
  return std::fabs(at_anchor - psi_anchor) <= tol;
}

// ---------------------------------------------------------------------------
// subtour elimination
// ---------------------------------------------------------------------------

// Undirected edge incidence over nodes 0..n-1 (node 0 = depot), edges stored
// in lexicographic (i, j) order with i < j.
struct EdgeVector {
  int node_count = 0;
  std::vector<std::uint8_t> value;

  EdgeVector() = default;
  explicit EdgeVector(int nodes)
      : node_count(nodes), value(static_cast<std::size_t>(nodes) * (nodes - 1) / 2, 0) {}

  static std::size_t index(int nodes, int i, int j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * nodes - static_cast<std::size_t>(i) * (i + 1) / 2 +
           (j - i - 1);
  }

  std::uint8_t at(int i, int j) const { return value[index(node_count, i, j)]; }
  void set(int i, int j, std::uint8_t v) { value[index(node_count, i, j)] = v; }
};

// Connected components of the active nodes (depot plus selected locations)
// under the given edge set. Every active node must have degree exactly two
// and inactive nodes degree zero, otherwise the encoding is malformed.
// Components come back sorted, each listing node ids ascending; the solution
// is a single depot-anchored tour iff there is exactly one component.
inline std::vector<std::vector<int>> find_subtours(std::span<const double> x,
                                                   const EdgeVector& y) {
  int nodes = y.node_count;
  if (static_cast<int>(x.size()) != nodes - 1)
    throw std::invalid_argument("find_subtours: selection length mismatch");
  std::vector<char> active(nodes, 0);
  active[0] = 1;
  for (int i = 1; i < nodes; ++i) active[i] = x[i - 1] > 0.5 ? 1 : 0;

  std::vector<int> deg(nodes, 0);
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j)
      if (y.at(i, j)) {
        deg[i] += y.at(i, j);  // a doubled edge (out-and-back tour) counts twice
        deg[j] += y.at(i, j);
      }
  for (int i = 0; i < nodes; ++i) {
    int want = active[i] ? 2 : 0;
    if (deg[i] != want)
      throw std::invalid_argument("find_subtours: node " + std::to_string(i) +
                                  " has degree " + std::to_string(deg[i]) + ", expected " +
                                  std::to_string(want));
  }

  std::vector<std::vector<int>> comps;
  std::vector<char> seen(nodes, 0);
  for (int s = 0; s < nodes; ++s) {
    if (!active[s] || seen[s]) continue;
    std::vector<int> comp, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int w = 0; w < nodes; ++w)
        if (w != u && active[w] && !seen[w] && y.at(u, w)) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::sort(comps.begin(), comps.end());
  return comps;
}

enum class SecKind { Sec1, Sec2 };

struct RoutingCut {
  SecKind kind = SecKind::Sec2;
  std::vector<int> nodes;  // node ids 1..m, ascending, never the depot
  int anchor = -1;         // anchor node for SEC-1, unused for SEC-2
};

inline std::vector<RoutingCut> sec_cuts(const std::vector<int>& component, SecKind kind) {
  if (component.size() < 3) throw std::invalid_argument("sec_cuts: component smaller than 3");
  std::vector<int> nodes(component);
  std::sort(nodes.begin(), nodes.end());
  for (int v : nodes)
    if (v < 1) throw std::invalid_argument("sec_cuts: depot cannot appear in a subtour cut");

  std::vector<RoutingCut> cuts;
  if (kind == SecKind::Sec1) {
    for (int k : nodes) cuts.push_back({SecKind::Sec1, nodes, k});
  } else {
    cuts.push_back({SecKind::Sec2, nodes, -1});
  }
  return cuts;
}

// Evaluates a subtour cut on a concrete (x, y); true when satisfied.
inline bool routing_cut_satisfied(const RoutingCut& cut, std::span<const double> x,
                                  const EdgeVector& y) {
  std::vector<char> in_set(y.node_count, 0);
  for (int v : cut.nodes) in_set[v] = 1;
  if (cut.kind == SecKind::Sec1) {
    int cross = 0;
    for (int i = 0; i < y.node_count; ++i)
      for (int j = i + 1; j < y.node_count; ++j)
        if (in_set[i] != in_set[j]) cross += y.at(i, j);
    return cross >= 2 * (x[cut.anchor - 1] > 0.5 ? 1 : 0);
  }
  int internal = 0;
  for (std::size_t a = 0; a < cut.nodes.size(); ++a)
    for (std::size_t b = a + 1; b < cut.nodes.size(); ++b)
      internal += y.at(cut.nodes[a], cut.nodes[b]);
  int selected = 0;
  for (int v : cut.nodes) selected += x[v - 1] > 0.5 ? 1 : 0;
  int size = static_cast<int>(cut.nodes.size());
  return size * internal <= (size - 1) * selected;
}

// ---------------------------------------------------------------------------
// pool
// ---------------------------------------------------------------------------

class CutPool {
 public:
  explicit CutPool(int groups) : by_group_(groups) {}

  int groups() const { return static_cast<int>(by_group_.size()); }

  // false when an equal cut (coefficients within 1e-12) is already stored
  bool add(const LinearCut& cut) {
    for (const LinearCut& c : by_group_.at(cut.group)) {
      if (std::fabs(c.beta - cut.beta) > 1e-12) continue;
      bool same = true;
      for (std::size_t i = 0; i < c.alpha.size() && same; ++i)
        same = std::fabs(c.alpha[i] - cut.alpha[i]) <= 1e-12;
      if (same) return false;
    }
    by_group_[cut.group].push_back(cut);
    ++linear_count_;
    return true;
  }

  bool add(const RoutingCut& cut) {
    for (const RoutingCut& c : routing_)
      if (c.kind == cut.kind && c.anchor == cut.anchor && c.nodes == cut.nodes) return false;
    routing_.push_back(cut);
    return true;
  }

  const std::vector<LinearCut>& group_cuts(int l) const { return by_group_.at(l); }
  const std::vector<RoutingCut>& routing_cuts() const { return routing_; }
  std::size_t linear_count() const { return linear_count_; }

 private:
  std::vector<std::vector<LinearCut>> by_group_;
  std::vector<RoutingCut> routing_;
  std::size_t linear_count_ = 0;
};

}  // namespace mcpr
