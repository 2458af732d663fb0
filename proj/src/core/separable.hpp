#pragma once
/* Separable sums F(z1,z2) = F1(z1) + F2(z2) on C^2: product critical data
 * and the product rule for connections (a connection is a component
 * connection with the other factor frozen at a critical point, or a pair
 * of component connections at a common angle, the latter never isolated).
 * General C^n is rejected by construction. */

#include "core/transport.hpp"

namespace fsforge {

struct SeparablePair {
  Polynomial F1, F2;
};

struct ProductCritical {
  int i1 = -1, i2 = -1;  // indices into the factor critical lists
  cplx value{};          // v1 + v2
};

/* All product critical points (z1_i, z2_j); value collisions in the sum
 * raise DegenerateValues. */
std::vector<ProductCritical> product_critical_points(const std::vector<CriticalDatum>& crit1,
                                                     const std::vector<CriticalDatum>& crit2,
                                                     const Tolerances& tol = {});

struct ProductConnection {
  int component = -1;   // which factor flows (0 or 1); -1 for both-moving
  int frozen = -1;      // critical index in the frozen factor (component-constant case)
  Flowline line;        // the moving component flowline (component-constant case)
  Flowline line_other;  // second factor flowline (both-moving case)
  double theta = 0.0;
  bool isolated = true;  // both-moving families carry a free relative time shift
};

/* Connections from (x1,x2) to (y1,y2) at theta = arg of the product value
 * difference. */
std::vector<ProductConnection> product_connections(const SeparablePair& F,
                                                   const std::vector<CriticalDatum>& crit1,
                                                   const std::vector<CriticalDatum>& crit2,
                                                   std::pair<int, int> from,
                                                   std::pair<int, int> to,
                                                   const ShootingConfig& cfg = {},
                                                   const Tolerances& tol = {});

/* Clean-intersection test for the product: a component-constant connection
 * is nondegenerate iff the frozen factor's Hessian is invertible and the
 * moving factor passes the scalar test; both-moving families have a
 * two-dimensional kernel. */
NondegeneracyReport product_nondegenerate(const SeparablePair& F,
                                          const ProductConnection& conn,
                                          const std::vector<CriticalDatum>& crit1,
                                          const std::vector<CriticalDatum>& crit2);

}  // namespace fsforge
