#include "core/separable.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace fsforge {

std::vector<ProductCritical> product_critical_points(const std::vector<CriticalDatum>& crit1,
                                                     const std::vector<CriticalDatum>& crit2,
                                                     const Tolerances& tol) {
  std::vector<ProductCritical> out;
  for (size_t i = 0; i < crit1.size(); ++i)
    for (size_t j = 0; j < crit2.size(); ++j)
      out.push_back({static_cast<int>(i), static_cast<int>(j),
                     crit1[i].value + crit2[j].value});
  for (size_t a = 0; a < out.size(); ++a)
    for (size_t b = a + 1; b < out.size(); ++b)
      if (std::abs(out[a].value - out[b].value) < tol.value_separation)
        fail(ErrorCode::degenerate_values, "product critical values collide");
  return out;
}

std::vector<ProductConnection> product_connections(const SeparablePair& F,
                                                   const std::vector<CriticalDatum>& crit1,
                                                   const std::vector<CriticalDatum>& crit2,
                                                   std::pair<int, int> from,
                                                   std::pair<int, int> to,
                                                   const ShootingConfig& cfg,
                                                   const Tolerances& tol) {
  std::vector<ProductConnection> out;
  const auto [x1, x2] = from;
  const auto [y1, y2] = to;
  if (x1 == y1 && x2 == y2) return out;

  if (x2 == y2) {  // factor 1 moves, factor 2 frozen
    for (auto& l : find_connections(F.F1, crit1, x1, y1, cfg, tol).flowlines) {
      ProductConnection c;
      c.component = 0;
      c.frozen = x2;
      c.theta = l.theta;
      c.line = std::move(l);
      out.push_back(std::move(c));
    }
    return out;
  }
  if (x1 == y1) {  // factor 2 moves
    for (auto& l : find_connections(F.F2, crit2, x2, y2, cfg, tol).flowlines) {
      ProductConnection c;
      c.component = 1;
      c.frozen = x1;
      c.theta = l.theta;
      c.line = std::move(l);
      out.push_back(std::move(c));
    }
    return out;
  }

  // Both factors move: pairs of component connections at a common angle.
  const double theta1 = std::arg(crit1[y1].value - crit1[x1].value);
  const double theta2 = std::arg(crit2[y2].value - crit2[x2].value);
  if (std::abs(std::remainder(theta1 - theta2, 2 * std::numbers::pi)) > 1e-9) return out;
  auto c1 = find_connections(F.F1, crit1, x1, y1, cfg, tol);
  auto c2 = find_connections(F.F2, crit2, x2, y2, cfg, tol);
  for (const auto& l1 : c1.flowlines)
    for (const auto& l2 : c2.flowlines) {
      ProductConnection c;
      c.component = -1;
      c.theta = theta1;
      c.line = l1;
      c.line_other = l2;
      c.isolated = false;  // relative time shift is a free parameter
      out.push_back(std::move(c));
    }
  return out;
}

NondegeneracyReport product_nondegenerate(const SeparablePair& F,
                                          const ProductConnection& conn,
                                          const std::vector<CriticalDatum>& crit1,
                                          const std::vector<CriticalDatum>& crit2) {
  NondegeneracyReport rep;
  if (!conn.isolated) {
    rep.nondegenerate = false;  // kernel contains both component velocities
    return rep;
  }
  const bool first_moves = conn.component == 0;
  const Polynomial& moving = first_moves ? F.F1 : F.F2;
  const auto& crit_moving = first_moves ? crit1 : crit2;
  const auto& crit_frozen = first_moves ? crit2 : crit1;

  // The frozen factor contributes a constant hyperbolic block: bounded
  // kernel solutions exist there iff its Hessian vanishes.
  const cplx frozen_hess = crit_frozen[conn.frozen].hessian;
  rep = nondegenerate(linearized_system(moving, conn.line, crit_moving));
  double frozen_gap = 2.0 * std::abs(std::polar(1.0, -conn.theta) * frozen_hess);
  if (first_moves)
    rep.eigen_gap_target = std::min(rep.eigen_gap_target, frozen_gap);
  else
    rep.eigen_gap_source = std::min(rep.eigen_gap_source, frozen_gap);
  rep.nondegenerate = rep.nondegenerate && frozen_gap > 1e-6;
  return rep;
}

}  // namespace fsforge
