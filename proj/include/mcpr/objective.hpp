#pragma once

// Multinomial-logit capture objective, its zone-group decomposition and the
// first-order (Taylor) machinery used by cuts and the heuristic.
//
// For a selection x in [0,1]^m, zone n contributes
//     q_n * (sum_i V_ni x_i) / (U^c_n + sum_i V_ni x_i)
// and the objective f(x) is the sum over zones. Psi_l(x) restricts the sum
// to the zones of group l, so sum_l Psi_l = f. Each Psi_l is concave on the
// box and, as a set function, monotone and submodular.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcpr/instance.hpp"

namespace mcpr {

using GroupPartition = std::vector<std::vector<int>>;  // zone indices, ascending

// Contiguous blocks of near-equal size; block k holds zones
// [k*N/L', (k+1)*N/L') with L' = min(L, N).
inline GroupPartition partition_zones(const Instance& inst, int groups) {
  if (groups < 1) throw std::invalid_argument("partition_zones: need at least one group");
  int n = inst.zone_count();
  int eff = std::min(groups, n);
  GroupPartition part(eff);
  for (int k = 0; k < eff; ++k) {
    int lo = static_cast<int>(static_cast<long long>(k) * n / eff);
    int hi = static_cast<int>(static_cast<long long>(k + 1) * n / eff);
    for (int z = lo; z < hi; ++z) part[k].push_back(z);
  }
  return part;
}

namespace detail {

inline double zone_mix(const Zone& z, std::span<const double> x) {
  double s = z.competitor;
  for (std::size_t i = 0; i < z.attraction.size(); ++i) s += z.attraction[i] * x[i];
  return s;  // U^c_n + sum_i V_ni x_i
}

inline double zone_mix_set(const Zone& z, const std::vector<int>& s) {
  double d = z.competitor;
  for (int i : s) d += z.attraction[i];
  return d;
}

}  // namespace detail

inline double eval_objective(const Instance& inst, std::span<const double> x) {
  double total = 0;
  for (const Zone& z : inst.zones) {
    double den = detail::zone_mix(z, x);
    total += z.demand * (den - z.competitor) / den;
  }
  return total;
}

inline double eval_group(const Instance& inst, const GroupPartition& part, int l,
                         std::span<const double> x) {
  double total = 0;
  for (int n : part.at(l)) {
    const Zone& z = inst.zones[n];
    double den = detail::zone_mix(z, x);
    total += z.demand * (den - z.competitor) / den;
  }
  return total;
}

// dPsi_l/dx_i = sum_{n in D_l} q_n V_ni U^c_n / (U^c_n + sum_j V_nj x_j)^2;
// accepts fractional points so finite differences can probe the interior.
inline Vec group_gradient(const Instance& inst, const GroupPartition& part, int l,
                          std::span<const double> x) {
  Vec g(inst.m, 0.0);
  for (int n : part.at(l)) {
    const Zone& z = inst.zones[n];
    double den = detail::zone_mix(z, x);
    double c = z.demand * z.competitor / (den * den);
    for (int i = 0; i < inst.m; ++i) g[i] += c * z.attraction[i];
  }
  return g;
}

// rho_lk(S) = Psi_l(S + k) - Psi_l(S), in closed form; zero when k already
// belongs to S.
inline double marginal_gain(const Instance& inst, const GroupPartition& part, int l, int k,
                            const std::vector<int>& s) {
  for (int i : s)
    if (i == k) return 0.0;
  std::vector<int> asc(s);
  std::sort(asc.begin(), asc.end());
  double total = 0;
  for (int n : part.at(l)) {
    const Zone& z = inst.zones[n];
    double den = detail::zone_mix_set(z, asc);
    total += z.demand * z.attraction[k] * z.competitor / (den * (den + z.attraction[k]));
  }
  return total;
}

// ---------------------------------------------------------------------------
// first-order overestimate around a base selection S0
// ---------------------------------------------------------------------------

struct TaylorCoefficients {
  double base = 0;  // f(S0)
  Vec coeff;        // F_i = sum_n q_n V_ni U^c_n / (U^c_n + sum_{j in S0} V_nj)^2
};

inline TaylorCoefficients taylor_coefficients(const Instance& inst, const std::vector<int>& s0) {
  TaylorCoefficients tc;
  tc.coeff.assign(inst.m, 0.0);
  // Ascending summation keeps the base bit-identical to eval_objective at
  // the same binary point regardless of the order s0 arrived in.
  std::vector<int> asc(s0);
  std::sort(asc.begin(), asc.end());
  for (const Zone& z : inst.zones) {
    double den = detail::zone_mix_set(z, asc);
    tc.base += z.demand * (den - z.competitor) / den;
    double c = z.demand * z.competitor / (den * den);
    for (int i = 0; i < inst.m; ++i) tc.coeff[i] += c * z.attraction[i];
  }
  return tc;
}

// f_hat(S) = f(S0) + sum_i F_i (x^S_i - x^{S0}_i); concavity of f over the
// box makes this an overestimate of f(S) for every S.
inline double taylor_estimate(const TaylorCoefficients& tc, const std::vector<int>& s0,
                              const std::vector<int>& s) {
  std::vector<char> in0(tc.coeff.size(), 0);
  for (int i : s0) in0[i] = 1;
  double v = tc.base;
  for (int i : s)
    if (!in0[i]) v += tc.coeff[i];
  std::vector<char> in1(tc.coeff.size(), 0);
  for (int i : s) in1[i] = 1;
  for (int i : s0)
    if (!in1[i]) v -= tc.coeff[i];
  return v;
}

}  // namespace mcpr
