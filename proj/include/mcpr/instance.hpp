#pragma once

// Problem data for the maximum capture problem with routing (MCP-R):
// a depot, m candidate locations, customer zones with multinomial-logit
// utilities, a symmetric travel-time matrix and a tour-length budget.
//
// Index conventions used across the whole library:
//   * locations are 0-based, i in [0, m)
//   * travel-matrix nodes are 0..m where node 0 is the depot and node
//     i+1 carries location i; tours are node sequences [0, ..., 0]
//   * selection vectors x have length m, x[i] in {0,1} (fractional
//     points are accepted wherever gradients are evaluated)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpr/rng.hpp"

namespace mcpr {

using Vec = std::vector<double>;

// Shared tolerance for "tour length fits the budget" so that the oracle,
// the exact solvers and the heuristic classify boundary tours identically.
inline constexpr double kBudgetEps = 1e-9;

struct Point {
  double x = 0;
  double y = 0;
};

class TravelMatrix {
 public:
  TravelMatrix() = default;
  explicit TravelMatrix(int nodes)
      : n_(nodes), t_(static_cast<std::size_t>(nodes) * nodes, 0.0) {}

  int nodes() const { return n_; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * n_ + j]; }
  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * n_ + j]; }

  bool operator==(const TravelMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> t_;
};

struct Zone {
  double demand = 0;      // q_n > 0
  double competitor = 0;  // aggregate competitor utility U^c_n > 0
  Vec attraction;         // V_ni > 0, one entry per candidate location

  bool operator==(const Zone&) const = default;
};

struct Instance {
  std::string name;
  int m = 0;        // number of candidate locations
  int cap_c = 0;    // at most this many locations may open, 0 <= cap_c <= m
  double t_max = 0; // tour length budget, >= 0
  std::vector<Zone> zones;
  TravelMatrix travel;                       // (m+1) x (m+1), node 0 = depot
  std::optional<std::vector<Point>> coords;  // depot first, when geometric

  int zone_count() const { return static_cast<int>(zones.size()); }

  bool fits_budget(double tour_len) const { return tour_len <= t_max + kBudgetEps; }

  // travel time shortcuts in location indices
  double depot_time(int loc) const { return travel.at(0, loc + 1); }
  double time(int a, int b) const { return travel.at(a + 1, b + 1); }

  double total_demand() const {
    double s = 0;
    for (const Zone& z : zones) s += z.demand;
    return s;
  }

  void validate() const;
};

inline void Instance::validate() const {
  if (m < 1) throw std::runtime_error("instance: needs at least one candidate location");
  if (cap_c < 0 || cap_c > m) throw std::runtime_error("instance: cap_c out of range [0, m]");
  if (!(t_max >= 0)) throw std::runtime_error("instance: negative t_max");
  if (travel.nodes() != m + 1) throw std::runtime_error("instance: travel matrix dimension mismatch");
  if (zones.empty()) throw std::runtime_error("instance: needs at least one customer zone");
  for (int i = 0; i <= m; ++i) {
    if (travel.at(i, i) != 0.0) throw std::runtime_error("instance: nonzero travel diagonal");
    for (int j = 0; j <= m; ++j) {
      double tij = travel.at(i, j);
      if (!(tij >= 0) || !std::isfinite(tij))
        throw std::runtime_error("instance: negative or non-finite travel time");
      if (std::fabs(tij - travel.at(j, i)) > 1e-9)
        throw std::runtime_error("instance: asymmetric travel matrix");
    }
  }
  for (std::size_t n = 0; n < zones.size(); ++n) {
    const Zone& z = zones[n];
    if (!(z.demand > 0)) throw std::runtime_error("instance: non-positive demand in zone " + std::to_string(n));
    if (!(z.competitor > 0))
      throw std::runtime_error("instance: non-positive competitor utility in zone " + std::to_string(n));
    if (static_cast<int>(z.attraction.size()) != m)
      throw std::runtime_error("instance: utility row length mismatch in zone " + std::to_string(n));
    for (double v : z.attraction)
      if (!(v > 0) || !std::isfinite(v))
        throw std::runtime_error("instance: non-positive utility in zone " + std::to_string(n));
  }
  if (coords && static_cast<int>(coords->size()) != m + 1)
    throw std::runtime_error("instance: coordinate list length mismatch");
}

inline TravelMatrix euclidean_travel_matrix(const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("euclidean_travel_matrix: no points");
  int n = static_cast<int>(pts.size());
  TravelMatrix t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      t.at(i, j) = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
  return t;
}

// ---------------------------------------------------------------------------
// text format
//
//   # comment lines start with '#'
//   MCPR <name> <m> <n_zones> <cap_c> <t_max>
//   either m+1 lines "idx x y" (depot first), or the literal MATRIX
//   followed by (m+1)^2 row-major entries
//   then n_zones lines "q U_comp V_1 ... V_m"
// ---------------------------------------------------------------------------

namespace detail {

inline std::string strip_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  for (char c : text) {
    if (c == '#') in_comment = true;
    if (c == '\n') in_comment = false;
    out.push_back(in_comment ? ' ' : c);
  }
  return out;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(detail::strip_comments(text));
  std::string magic;
  if (!(in >> magic)) throw std::runtime_error("parse: empty input");
  if (magic != "MCPR") throw std::runtime_error("parse: expected MCPR header, got '" + magic + "'");

  Instance inst;
  int n_zones = 0;
  if (!(in >> inst.name >> inst.m >> n_zones >> inst.cap_c >> inst.t_max))
    throw std::runtime_error("parse: malformed header line");
  if (inst.m < 1) throw std::runtime_error("parse: m must be positive");
  if (n_zones < 1) throw std::runtime_error("parse: zone count must be positive");

  std::string tok;
  if (!(in >> tok)) throw std::runtime_error("parse: missing geometry section");
  if (tok == "MATRIX") {
    inst.travel = TravelMatrix(inst.m + 1);
    for (int i = 0; i <= inst.m; ++i)
      for (int j = 0; j <= inst.m; ++j)
        if (!(in >> inst.travel.at(i, j)))
          throw std::runtime_error("parse: travel matrix truncated");
  } else {
    std::vector<Point> pts(inst.m + 1);
    // tok already holds the first index
    for (int i = 0; i <= inst.m; ++i) {
      int idx;
      if (i == 0) {
        idx = std::stoi(tok);
      } else if (!(in >> idx)) {
        throw std::runtime_error("parse: coordinate section truncated");
      }
      if (idx != i) throw std::runtime_error("parse: coordinate index out of order");
      if (!(in >> pts[i].x >> pts[i].y)) throw std::runtime_error("parse: malformed coordinate line");
    }
    inst.coords = pts;
    inst.travel = euclidean_travel_matrix(pts);
  }

  inst.zones.resize(n_zones);
  for (int n = 0; n < n_zones; ++n) {
    Zone& z = inst.zones[n];
    if (!(in >> z.demand >> z.competitor)) throw std::runtime_error("parse: malformed zone line");
    z.attraction.resize(inst.m);
    for (int i = 0; i < inst.m; ++i)
      if (!(in >> z.attraction[i])) throw std::runtime_error("parse: zone utility row truncated");
  }
  if (in >> tok) throw std::runtime_error("parse: trailing data after zones");

  inst.validate();
  return inst;
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "MCPR " << inst.name << ' ' << inst.m << ' ' << inst.zone_count() << ' ' << inst.cap_c
      << ' ' << detail::fmt17(inst.t_max) << '\n';
  if (inst.coords) {
    for (int i = 0; i <= inst.m; ++i)
      out << i << ' ' << detail::fmt17((*inst.coords)[i].x) << ' '
          << detail::fmt17((*inst.coords)[i].y) << '\n';
  } else {
    out << "MATRIX\n";
    for (int i = 0; i <= inst.m; ++i) {
      for (int j = 0; j <= inst.m; ++j) out << (j ? " " : "") << detail::fmt17(inst.travel.at(i, j));
      out << '\n';
    }
  }
  for (const Zone& z : inst.zones) {
    out << detail::fmt17(z.demand) << ' ' << detail::fmt17(z.competitor);
    for (double v : z.attraction) out << ' ' << detail::fmt17(v);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// utilities from raw (log-scale) attractiveness
// ---------------------------------------------------------------------------

struct ZoneUtilities {
  std::vector<Vec> attraction;  // V_ni = exp(v_ni - v_n)
  Vec competitor;               // U^c_n = exp(v_n - v_n) = 1
  std::size_t clamped = 0;      // count of exponents that hit the +-700 guard
};

// v_raw[n][i] is the raw utility of location i in zone n, v_comp[n] the raw
// competitor utility. Normalizing by v_comp keeps exp() in range; arguments
// beyond +-700 are clamped and counted so callers can surface a diagnostic.
inline ZoneUtilities make_utilities(const std::vector<Vec>& v_raw, const Vec& v_comp) {
  if (v_raw.size() != v_comp.size()) throw std::invalid_argument("make_utilities: size mismatch");
  ZoneUtilities u;
  u.attraction.resize(v_raw.size());
  u.competitor.assign(v_raw.size(), 1.0);
  for (std::size_t n = 0; n < v_raw.size(); ++n) {
    u.attraction[n].resize(v_raw[n].size());
    for (std::size_t i = 0; i < v_raw[n].size(); ++i) {
      double e = v_raw[n][i] - v_comp[n];
      if (e > 700.0) { e = 700.0; ++u.clamped; }
      if (e < -700.0) { e = -700.0; ++u.clamped; }
      u.attraction[n][i] = std::exp(e);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// synthetic generator
// ---------------------------------------------------------------------------

struct SyntheticOptions {
  double box_side = 100.0;  // locations uniform in [0, side]^2, depot at center
  double rho = 0.5;         // t_max = rho * nearest-neighbour tour length
};

// Draw order (fixed so seeds stay meaningful): location coordinates, then per
// zone the demand followed by the raw utility row.
inline Instance generate_synthetic(int m, int n_zones, std::uint64_t seed,
                                   const SyntheticOptions& opt = {}) {
  if (m < 1 || n_zones < 1) throw std::invalid_argument("generate_synthetic: bad dimensions");
  Rng rng(seed);
  Instance inst;
  inst.name = "synth-m" + std::to_string(m) + "-z" + std::to_string(n_zones) + "-s" +
              std::to_string(seed);
  inst.m = m;
  inst.cap_c = m;

  std::vector<Point> pts(m + 1);
  pts[0] = {opt.box_side / 2, opt.box_side / 2};
  for (int i = 1; i <= m; ++i)
    pts[i] = {rng.uniform(0, opt.box_side), rng.uniform(0, opt.box_side)};
  inst.coords = pts;
  inst.travel = euclidean_travel_matrix(pts);

  std::vector<Vec> v_raw(n_zones, Vec(m));
  Vec v_comp(n_zones, 0.0);
  inst.zones.resize(n_zones);
  for (int n = 0; n < n_zones; ++n) {
    inst.zones[n].demand = static_cast<double>(rng.uniform_int(1, 100));
    for (int i = 0; i < m; ++i) v_raw[n][i] = rng.uniform(-1.0, 1.0);
  }
  ZoneUtilities u = make_utilities(v_raw, v_comp);
  for (int n = 0; n < n_zones; ++n) {
    inst.zones[n].competitor = u.competitor[n];
    inst.zones[n].attraction = u.attraction[n];
  }

  // nearest-neighbour tour over all nodes, ties to the smaller index
  double nn_len = 0;
  std::vector<char> seen(m + 1, 0);
  int cur = 0;
  seen[0] = 1;
  for (int step = 0; step < m; ++step) {
    int best = -1;
    for (int j = 1; j <= m; ++j)
      if (!seen[j] && (best < 0 || inst.travel.at(cur, j) < inst.travel.at(cur, best)))
        best = j;
    nn_len += inst.travel.at(cur, best);
    seen[best] = 1;
    cur = best;
  }
  nn_len += inst.travel.at(cur, 0);
  inst.t_max = opt.rho * nn_len;

  inst.validate();
  return inst;
}

// One clone per multiplier with t_max scaled; every other field is copied
// unchanged.
inline std::vector<Instance> derive_budget_variants(const Instance& inst, const Vec& multipliers) {
  std::vector<Instance> out;
  out.reserve(multipliers.size());
  for (double mult : multipliers) {
    if (!(mult > 0)) throw std::invalid_argument("derive_budget_variants: non-positive multiplier");
    Instance v = inst;
    v.t_max = inst.t_max * mult;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mcpr
