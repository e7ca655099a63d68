#pragma once

// Explicit mixed-integer model objects for the four formulations:
//
//   build_mtz_model        directed tour skeleton with MTZ ordering rows
//   build_linearized_milp  bilinear terms x_i * w_n linearized via s_ni
//   build_conic_model      hyperbolic rows r_n * w_n >= 1, export only
//   build_master_model     relaxed undirected master with theta variables
//
// The builders are pure and only assemble coefficient data; solving happens
// elsewhere (the enumeration backend for the master, external tools for the
// exported LP files).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpr/instance.hpp"
#include "mcpr/objective.hpp"

namespace mcpr {

enum class VarKind { Binary, Continuous };

// What a variable stands for; `a`/`b` carry the indices behind the name
// (location, zone, edge endpoints, group) so tooling never re-parses names.
enum class VarRole {
  Select,     // x_a        (a = location id; master also has the depot x_0)
  Edge,       // y_a_b      (directed arc or undirected pair)
  Order,      // p_a        (tour position of location a)
  ZoneShare,  // w_a        (1 / mix denominator of zone a)
  ZoneSplit,  // s_a_b      (w_a * x_b linearization)
  ZoneRate,   // r_a        (mix denominator of zone a)
  GroupValue  // theta_a    (captured demand of group a)
};

struct ModelVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0;
  double ub = 1;
  VarRole role = VarRole::Select;
  int a = -1;
  int b = -1;

  bool operator==(const ModelVariable&) const = default;
};

enum class Relation { LessEq, Equal, GreaterEq };

struct LinearTerm {
  int var = -1;
  double coeff = 0;

  bool operator==(const LinearTerm&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation rel = Relation::LessEq;
  double rhs = 0;

  bool operator==(const LinearConstraint&) const = default;
};

struct MipModel {
  std::string name;
  std::vector<ModelVariable> vars;
  std::vector<LinearTerm> objective;  // sense: maximize
  double objective_offset = 0;
  std::vector<LinearConstraint> cons;

  bool operator==(const MipModel&) const = default;

  int add_var(std::string n, VarKind kind, double lb, double ub, VarRole role, int a = -1,
              int b = -1) {
    vars.push_back({std::move(n), kind, lb, ub, role, a, b});
    return static_cast<int>(vars.size()) - 1;
  }

  int find_var(const std::string& n) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == n) return static_cast<int>(i);
    return -1;
  }

  // Structural sanity: every referenced variable exists, binaries are [0,1].
  void validate() const {
    auto check_terms = [&](const std::vector<LinearTerm>& terms, const std::string& where) {
      for (const LinearTerm& t : terms)
        if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
          throw std::logic_error("model: undeclared variable in " + where);
    };
    check_terms(objective, "objective");
    for (const LinearConstraint& c : cons) check_terms(c.terms, c.name);
    for (const ModelVariable& v : vars)
      if (v.kind == VarKind::Binary && (v.lb != 0 || v.ub != 1))
        throw std::logic_error("model: binary variable " + v.name + " not in [0,1]");
  }
};

// A quadratic row r * w >= rhs attached to a zone; kept outside the linear
// constraint list so linear tooling never sees it.
struct HyperbolicRow {
  std::string name;
  int r_var = -1;
  int w_var = -1;
  double rhs = 1.0;
  int zone = -1;

  bool operator==(const HyperbolicRow&) const = default;
};

struct ConicModel {
  MipModel mip;
  std::vector<HyperbolicRow> hyperbolic;

  bool operator==(const ConicModel&) const = default;
};

namespace detail {

// Travel time between extended node ids where m+1 is the duplicate depot.
inline double arc_time(const Instance& inst, int i, int j) {
  int a = (i == inst.m + 1) ? 0 : i;
  int b = (j == inst.m + 1) ? 0 : j;
  return inst.travel.at(a, b);
}

}  // namespace detail

// Directed tour skeleton over nodes {0..m+1} (0 and m+1 are the same physical
// depot): two depot-flow rows, 2m linkage rows, one budget row and m*m
// ordering rows. No cardinality row and an empty objective; callers layer
// their own objective machinery on top.
inline MipModel build_mtz_model(const Instance& inst) {
  MipModel mdl;
  mdl.name = inst.name + "-mtz";
  int m = inst.m;

  std::vector<int> xv(m + 1, -1);
  for (int i = 1; i <= m; ++i)
    xv[i] = mdl.add_var("x" + std::to_string(i), VarKind::Binary, 0, 1, VarRole::Select, i);

  // arcs i -> j with i in {0..m}, j in {1..m+1}
  std::vector<std::vector<int>> yv(m + 1, std::vector<int>(m + 2, -1));
  for (int i = 0; i <= m; ++i)
    for (int j = 1; j <= m + 1; ++j)
      yv[i][j] = mdl.add_var("y" + std::to_string(i) + "_" + std::to_string(j), VarKind::Binary,
                             0, 1, VarRole::Edge, i, j);

  std::vector<int> pv(m + 1, -1);
  for (int i = 1; i <= m; ++i)
    pv[i] = mdl.add_var("p" + std::to_string(i), VarKind::Continuous, 1, m, VarRole::Order, i);

  {
    LinearConstraint c{"depart", {}, Relation::Equal, 1};
    for (int j = 1; j <= m + 1; ++j) c.terms.push_back({yv[0][j], 1});
    mdl.cons.push_back(std::move(c));
  }
  {
    LinearConstraint c{"return", {}, Relation::Equal, 1};
    for (int i = 0; i <= m; ++i) c.terms.push_back({yv[i][m + 1], 1});
    mdl.cons.push_back(std::move(c));
  }
  for (int i = 1; i <= m; ++i) {
    LinearConstraint cin{"in" + std::to_string(i), {}, Relation::Equal, 0};
    for (int j = 0; j <= m; ++j) cin.terms.push_back({yv[j][i], 1});
    cin.terms.push_back({xv[i], -1});
    mdl.cons.push_back(std::move(cin));

    LinearConstraint cout{"out" + std::to_string(i), {}, Relation::Equal, 0};
    for (int k = 1; k <= m + 1; ++k) cout.terms.push_back({yv[i][k], 1});
    cout.terms.push_back({xv[i], -1});
    mdl.cons.push_back(std::move(cout));
  }
  {
    LinearConstraint c{"budget", {}, Relation::LessEq, inst.t_max};
    for (int i = 0; i <= m; ++i)
      for (int j = 1; j <= m + 1; ++j) {
        double t = detail::arc_time(inst, i, j);
        if (t != 0) c.terms.push_back({yv[i][j], t});
      }
    mdl.cons.push_back(std::move(c));
  }
  // p_i - p_j + m y_ij <= m - 1 for every ordered pair; the i = j rows
  // collapse to m y_ii <= m - 1 and pin the self-loop arcs to zero.
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      LinearConstraint c{"order" + std::to_string(i) + "_" + std::to_string(j),
                         {},
                         Relation::LessEq,
                         static_cast<double>(m - 1)};
      if (i != j) {
        c.terms.push_back({pv[i], 1});
        c.terms.push_back({pv[j], -1});
      }
      c.terms.push_back({yv[i][j], static_cast<double>(m)});
      mdl.cons.push_back(std::move(c));
    }

  return mdl;
}

// Per-zone bounds on w_n used by the linearization rows.
struct LinearizationBounds {
  Vec upper;  // w^U_n
  Vec lower;  // w^L_n
};

// Valid defaults: w_n = 1/(U^c_n + mix) never exceeds 1/U^c_n (equal to 1
// under the usual exp-normalized utilities) and never goes below 0.
inline LinearizationBounds default_linearization_bounds(const Instance& inst) {
  LinearizationBounds b;
  for (const Zone& z : inst.zones) {
    b.upper.push_back(1.0 / z.competitor);
    b.lower.push_back(0.0);
  }
  return b;
}

// Bilinear-term linearization of the capture objective on top of the tour
// skeleton: variables w_n and s_ni, the definition row
// sum_i V_ni s_ni + U^c_n w_n = 1, and four box rows per (n, i). The upper
// bound on the s_ni <= w^U x_i row is tightened to 1/(U^c_n + V_ni), valid
// because s_ni can only reach it when x_i = 1.
inline MipModel build_linearized_milp(const Instance& inst, const LinearizationBounds& bounds) {
  int nz = inst.zone_count();
  if (static_cast<int>(bounds.upper.size()) != nz ||
      static_cast<int>(bounds.lower.size()) != nz)
    throw std::invalid_argument("linearized milp: bound vector length mismatch");
  for (int n = 0; n < nz; ++n)
    if (!(0 <= bounds.lower[n] && bounds.lower[n] < bounds.upper[n]))
      throw std::invalid_argument("linearized milp: need 0 <= lower < upper for zone " +
                                  std::to_string(n + 1));

  MipModel mdl = build_mtz_model(inst);
  mdl.name = inst.name + "-milp";
  int m = inst.m;

  {
    LinearConstraint c{"card", {}, Relation::LessEq, static_cast<double>(inst.cap_c)};
    for (int i = 1; i <= m; ++i) c.terms.push_back({mdl.find_var("x" + std::to_string(i)), 1});
    mdl.cons.push_back(std::move(c));
  }

  std::vector<int> wv(nz, -1);
  std::vector<std::vector<int>> sv(nz, std::vector<int>(m, -1));
  for (int n = 0; n < nz; ++n) {
    wv[n] = mdl.add_var("w" + std::to_string(n + 1), VarKind::Continuous, bounds.lower[n],
                        bounds.upper[n], VarRole::ZoneShare, n);
    for (int i = 0; i < m; ++i)
      sv[n][i] = mdl.add_var("s" + std::to_string(n + 1) + "_" + std::to_string(i + 1),
                             VarKind::Continuous, 0, bounds.upper[n], VarRole::ZoneSplit, n, i);
  }

  for (int n = 0; n < nz; ++n) {
    const Zone& z = inst.zones[n];
    std::string zn = std::to_string(n + 1);

    LinearConstraint def{"mix" + zn, {}, Relation::Equal, 1};
    for (int i = 0; i < m; ++i) def.terms.push_back({sv[n][i], z.attraction[i]});
    def.terms.push_back({wv[n], z.competitor});
    mdl.cons.push_back(std::move(def));

    for (int i = 0; i < m; ++i) {
      std::string si = zn + "_" + std::to_string(i + 1);
      int xvar = mdl.find_var("x" + std::to_string(i + 1));
      double tight = std::min(bounds.upper[n], 1.0 / (z.competitor + z.attraction[i]));

      // s_ni <= w^U_ni x_i
      mdl.cons.push_back({"su" + si, {{sv[n][i], 1}, {xvar, -tight}}, Relation::LessEq, 0});
      // s_ni >= w^L_n x_i
      mdl.cons.push_back(
          {"sl" + si, {{sv[n][i], 1}, {xvar, -bounds.lower[n]}}, Relation::GreaterEq, 0});
      // s_ni <= w_n + w^L_n (x_i - 1)
      mdl.cons.push_back({"sw" + si,
                          {{sv[n][i], 1}, {wv[n], -1}, {xvar, -bounds.lower[n]}},
                          Relation::LessEq,
                          -bounds.lower[n]});
      // s_ni >= w_n + w^U_n (x_i - 1)
      mdl.cons.push_back({"ws" + si,
                          {{sv[n][i], 1}, {wv[n], -1}, {xvar, -bounds.upper[n]}},
                          Relation::GreaterEq,
                          -bounds.upper[n]});
    }
  }

  mdl.objective.clear();
  for (int n = 0; n < nz; ++n)
    for (int i = 0; i < m; ++i)
      mdl.objective.push_back({sv[n][i], inst.zones[n].demand * inst.zones[n].attraction[i]});
  mdl.objective_offset = 0;
  return mdl;
}

inline MipModel build_linearized_milp(const Instance& inst) {
  return build_linearized_milp(inst, default_linearization_bounds(inst));
}

// Fractional objective rewritten with constant numerators,
// sum_n q_n - sum_n q_n U^c_n w_n, plus the denominator definition
// r_n = sum_i V_ni x_i + U^c_n and one hyperbolic row r_n w_n >= 1 per zone.
inline ConicModel build_conic_model(const Instance& inst) {
  ConicModel conic;
  MipModel& mdl = conic.mip;
  mdl = build_mtz_model(inst);
  mdl.name = inst.name + "-conic";
  int m = inst.m;
  int nz = inst.zone_count();

  {
    LinearConstraint c{"card", {}, Relation::LessEq, static_cast<double>(inst.cap_c)};
    for (int i = 1; i <= m; ++i) c.terms.push_back({mdl.find_var("x" + std::to_string(i)), 1});
    mdl.cons.push_back(std::move(c));
  }

  double inf = std::numeric_limits<double>::infinity();
  for (int n = 0; n < nz; ++n) {
    const Zone& z = inst.zones[n];
    std::string zn = std::to_string(n + 1);
    int wv = mdl.add_var("w" + zn, VarKind::Continuous, 0, 1.0 / z.competitor,
                         VarRole::ZoneShare, n);
    int rv = mdl.add_var("r" + zn, VarKind::Continuous, 0, inf, VarRole::ZoneRate, n);

    LinearConstraint def{"rate" + zn, {}, Relation::Equal, z.competitor};
    def.terms.push_back({rv, 1});
    for (int i = 0; i < m; ++i)
      def.terms.push_back({mdl.find_var("x" + std::to_string(i + 1)), -z.attraction[i]});
    mdl.cons.push_back(std::move(def));

    conic.hyperbolic.push_back({"hyp" + zn, rv, wv, 1.0, n});
    mdl.objective.push_back({wv, -z.demand * z.competitor});
    mdl.objective_offset += z.demand;
  }
  return conic;
}

// Relaxed undirected master: selection variables x_0..x_m (depot pinned to
// one), one edge variable per unordered pair, group variables theta_l with
// the demand-sum seed upper bound, objective sum_l theta_l. Objective cuts
// and subtour cuts live in the solver's pool, not here.
inline MipModel build_master_model(const Instance& inst, const GroupPartition& part) {
  MipModel mdl;
  mdl.name = inst.name + "-master";
  int m = inst.m;

  std::vector<int> xv(m + 1, -1);
  for (int i = 0; i <= m; ++i)
    xv[i] = mdl.add_var("x" + std::to_string(i), VarKind::Binary, 0, 1, VarRole::Select, i);

  std::vector<std::vector<int>> ev(m + 1, std::vector<int>(m + 1, -1));
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      ev[i][j] = mdl.add_var("y" + std::to_string(i) + "_" + std::to_string(j), VarKind::Binary,
                             0, 1, VarRole::Edge, i, j);

  for (std::size_t l = 0; l < part.size(); ++l) {
    double cap = 0;
    for (int n : part[l]) cap += inst.zones[n].demand;
    int tv = mdl.add_var("theta" + std::to_string(l + 1), VarKind::Continuous, 0, cap,
                         VarRole::GroupValue, static_cast<int>(l));
    mdl.objective.push_back({tv, 1});
  }

  {
    LinearConstraint c{"card", {}, Relation::LessEq, static_cast<double>(inst.cap_c)};
    for (int i = 1; i <= m; ++i) c.terms.push_back({xv[i], 1});
    mdl.cons.push_back(std::move(c));
  }
  {
    LinearConstraint c{"budget", {}, Relation::LessEq, inst.t_max};
    for (int i = 0; i <= m; ++i)
      for (int j = i + 1; j <= m; ++j) {
        double t = inst.travel.at(i, j);
        if (t != 0) c.terms.push_back({ev[i][j], t});
      }
    mdl.cons.push_back(std::move(c));
  }
  for (int j = 0; j <= m; ++j) {
    LinearConstraint c{"deg" + std::to_string(j), {}, Relation::Equal, 0};
    for (int i = 0; i <= m; ++i) {
      if (i == j) continue;
      c.terms.push_back({ev[std::min(i, j)][std::max(i, j)], 1});
    }
    c.terms.push_back({xv[j], -2});
    mdl.cons.push_back(std::move(c));
  }
  mdl.cons.push_back({"depot", {{xv[0], 1}}, Relation::Equal, 1});

  return mdl;
}

namespace detail {

inline bool row_holds(const LinearConstraint& c, const Vec& assign, double tol) {
  double lhs = 0;
  for (const LinearTerm& t : c.terms) lhs += t.coeff * assign[t.var];
  switch (c.rel) {
    case Relation::LessEq: return lhs <= c.rhs + tol;
    case Relation::GreaterEq: return lhs >= c.rhs - tol;
    case Relation::Equal: return std::fabs(lhs - c.rhs) <= tol;
  }
  return false;
}

}  // namespace detail

// Fixes the selection, derives the per-zone values the formulation is meant
// to reproduce (w_n = 1/(U^c_n + mix), s_ni = x_i w_n, r_n = 1/w_n), verifies
// every linear row made of those variables, and returns the model objective,
// which must equal the capture objective at x. Rows touching the routing
// machinery (arcs, order variables) are outside this check's scope.
inline double check_fixed_x_consistency(const MipModel& mdl, const Instance& inst,
                                        std::span<const double> x, double tol = 1e-9) {
  if (static_cast<int>(x.size()) != inst.m)
    throw std::invalid_argument("consistency check: selection length mismatch");

  Vec assign(mdl.vars.size(), 0.0);
  std::vector<char> known(mdl.vars.size(), 0);
  for (std::size_t v = 0; v < mdl.vars.size(); ++v) {
    const ModelVariable& var = mdl.vars[v];
    switch (var.role) {
      case VarRole::Select:
        if (var.a >= 1) {
          assign[v] = x[var.a - 1] > 0.5 ? 1.0 : 0.0;
          known[v] = 1;
        } else if (var.a == 0) {
          assign[v] = 1.0;  // master depot selector
          known[v] = 1;
        }
        break;
      case VarRole::ZoneShare: {
        double den = detail::zone_mix(inst.zones[var.a], x);
        assign[v] = 1.0 / den;
        known[v] = 1;
        break;
      }
      case VarRole::ZoneSplit: {
        double den = detail::zone_mix(inst.zones[var.a], x);
        assign[v] = (x[var.b] > 0.5 ? 1.0 : 0.0) / den;
        known[v] = 1;
        break;
      }
      case VarRole::ZoneRate: {
        assign[v] = detail::zone_mix(inst.zones[var.a], x);
        known[v] = 1;
        break;
      }
      default:
        break;
    }
  }

  for (const LinearConstraint& c : mdl.cons) {
    bool closed = true;
    for (const LinearTerm& t : c.terms)
      if (!known[t.var]) {
        closed = false;
        break;
      }
    if (!closed) continue;
    if (!detail::row_holds(c, assign, tol))
      throw std::runtime_error("consistency check: row " + c.name + " violated");
  }

  double obj = mdl.objective_offset;
  for (const LinearTerm& t : mdl.objective) {
    if (!known[t.var]) throw std::runtime_error("consistency check: objective term not fixed");
    obj += t.coeff * assign[t.var];
  }
  return obj;
}

inline double check_fixed_x_consistency(const ConicModel& conic, const Instance& inst,
                                        std::span<const double> x, double tol = 1e-9) {
  double obj = check_fixed_x_consistency(conic.mip, inst, x, tol);
  for (const HyperbolicRow& h : conic.hyperbolic) {
    double den = detail::zone_mix(inst.zones[h.zone], x);
    double prod = den * (1.0 / den);
    if (prod < h.rhs - tol)
      throw std::runtime_error("consistency check: row " + h.name + " violated");
  }
  return obj;
}

// Decides whether the tour skeleton admits a feasible assignment once x is
// fixed, by trying every visiting order of the selected locations and
// evaluating all model rows literally on the induced arc/order assignment.
// Factorial search; meant for small verification instances.
inline bool mtz_assignment_exists(const MipModel& mdl, const Instance& inst,
                                  std::span<const double> x, double tol = 1e-9) {
  if (static_cast<int>(x.size()) != inst.m)
    throw std::invalid_argument("mtz assignment: selection length mismatch");
  int m = inst.m;

  std::vector<int> sel;
  for (int i = 0; i < m; ++i)
    if (x[i] > 0.5) sel.push_back(i + 1);
  if (static_cast<int>(sel.size()) > 9)
    throw std::invalid_argument("mtz assignment: more than 9 selected locations");

  auto try_order = [&](const std::vector<int>& order) {
    Vec assign(mdl.vars.size(), 0.0);
    for (std::size_t v = 0; v < mdl.vars.size(); ++v) {
      const ModelVariable& var = mdl.vars[v];
      if (var.role == VarRole::Select && var.a >= 1) assign[v] = x[var.a - 1] > 0.5 ? 1.0 : 0.0;
    }
    // arcs 0 -> order[0] -> ... -> order[k-1] -> m+1, or 0 -> m+1 when empty
    int prev = 0;
    for (std::size_t p = 0; p < order.size(); ++p) {
      int yv = mdl.find_var("y" + std::to_string(prev) + "_" + std::to_string(order[p]));
      assign[yv] = 1.0;
      int pv = mdl.find_var("p" + std::to_string(order[p]));
      assign[pv] = static_cast<double>(p + 1);
      prev = order[p];
    }
    assign[mdl.find_var("y" + std::to_string(prev) + "_" + std::to_string(m + 1))] = 1.0;
    // unvisited locations still need an order value inside [1, m]
    for (int i = 1; i <= m; ++i) {
      int pv = mdl.find_var("p" + std::to_string(i));
      if (assign[pv] == 0.0) assign[pv] = 1.0;
    }
    for (const LinearConstraint& c : mdl.cons)
      if (!detail::row_holds(c, assign, tol)) return false;
    return true;
  };

  std::sort(sel.begin(), sel.end());
  if (sel.empty()) return try_order({});
  do {
    if (try_order(sel)) return true;
  } while (std::next_permutation(sel.begin(), sel.end()));
  return false;
}

}  // namespace mcpr
