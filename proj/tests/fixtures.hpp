#pragma once

// Shared hand-checked fixtures. tiny2 is small enough that every quantity in
// the tests (objective values, cut coefficients, tour lengths) was computed
// by hand; the cluster fixtures stress the subtour machinery.

#include "mcpr/instance.hpp"
#include "mcpr/oracle.hpp"

namespace fx {

// Two locations, unit distances everywhere, one zone with q=1, U^c=1,
// V=(1,3). f(empty)=0, f({1})=0.5, f({2})=0.75, f({1,2})=0.8; the full tour
// 0-1-2-0 has length 3 = t_max.
inline mcpr::Instance tiny2() {
  mcpr::Instance inst;
  inst.name = "tiny2";
  inst.m = 2;
  inst.cap_c = 2;
  inst.t_max = 3;
  inst.travel = mcpr::TravelMatrix(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inst.travel.at(i, j) = i == j ? 0.0 : 1.0;
  inst.zones = {{1.0, 1.0, {1.0, 3.0}}};
  inst.validate();
  return inst;
}

// two_cluster_fixture relaxed so the cardinality cap no longer rules out a
// two-cycle cover: the cheapest degree-two edge set over all five locations
// is the depot triangle 0-1-2 (length 11) plus the far triangle 3-4-5
// (length 3), which forces at least one subtour-cut round.
inline mcpr::Instance two_cluster_wide() {
  mcpr::Instance inst = mcpr::two_cluster_fixture();
  inst.name = "two-cluster-wide";
  inst.cap_c = 5;
  inst.t_max = 26;
  return inst;
}

}  // namespace fx
