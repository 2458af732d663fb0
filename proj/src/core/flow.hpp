#pragma once
/* Gradient trajectories of f_theta = Re(e^{-i theta} F): launch rays at a
 * critical point, shooting between critical points, mod-2 connection
 * counts, regularized actions, and smooth evaluation of computed
 * flowlines (Hermite inside the sampled window, exponential tails
 * outside). */

#include <array>

#include "core/landscape.hpp"
#include "core/ode.hpp"

namespace fsforge {

/* grad f_theta as a complex number: conj(e^{-i theta} F'(z)). */
cplx gradient_field(const Polynomial& F, double theta, cplx z);

/* g_theta = Im(e^{-i theta} F), conserved along the flow. */
double conserved_height(const Polynomial& F, double theta, cplx z);

/* Unit vectors spanning the ascent ray pair at a critical point:
 * 2 beta = theta - arg F''(x). */
std::array<cplx, 2> unstable_directions(const CriticalDatum& x, double theta);

struct Flowline {
  double theta = 0.0;
  int source = -1, target = -1;  // indices into the critical list
  std::vector<RkSample> samples;
  double conserved_drift = 0.0;
  double segment_deviation = 0.0;
  double action = 0.0;
  double launch_angle = 0.0;
};

/* One trajectory from an arbitrary (non-critical) start, stopping on
 * capture at a critical point, escape past r_max, or the time budget. */
IntegrationResult integrate_flow(const Polynomial& F, double theta, cplx z0,
                                 const std::vector<CriticalDatum>& crit,
                                 const ShootingConfig& cfg = {},
                                 const Tolerances& tol = {});

struct ConnectionSet {
  double theta = 0.0;
  std::vector<Flowline> flowlines;
  int count_mod2 = 0;
};

/* Connections x -> y at theta = arg(v_y - v_x), found by shooting along
 * both unstable rays of x.  Throws DegenerateValues /
 * InteriorCriticalValue / Inconclusive / DriftExceeded. */
ConnectionSet find_connections(const Polynomial& F,
                               const std::vector<CriticalDatum>& crit, int x,
                               int y, const ShootingConfig& cfg = {},
                               const Tolerances& tol = {});

/* Regularized action: int 1/2 Im(conj(gamma) gamma') dt with exponential
 * tail corrections, minus the conserved-drift integral. */
double flow_action(const Polynomial& F, const Flowline& line,
                   const std::vector<CriticalDatum>& crit);

enum class HomKind { zero, identity, flowlines };
struct HomBasis {
  HomKind kind = HomKind::zero;
  std::vector<Flowline> gens;
};

/* Directedness: generators only from earlier to strictly later objects in
 * the clockwise order; identity on the diagonal. */
HomBasis hom_basis(const Polynomial& F, const PhaseGeometry& geom,
                   const std::vector<CriticalDatum>& crit, int x, int y,
                   const ShootingConfig& cfg = {}, const Tolerances& tol = {});

/* Smooth evaluator for a computed flowline.  Time is re-centered so that
 * t = 0 is the value-segment midpoint; outside the sampled window the
 * trajectory is continued by the exact linearized decay/growth rates
 * |F''| at the endpoints. */
class FlowlineEval {
 public:
  FlowlineEval() = default;
  FlowlineEval(const Polynomial& F, const Flowline& line,
               const std::vector<CriticalDatum>& crit);
  cplx operator()(double t) const;
  double t_first() const { return ts_.front(); }
  double t_last() const { return ts_.back(); }
  double theta() const { return theta_; }
  cplx source_point() const { return x_; }
  cplx target_point() const { return y_; }
  int source() const { return source_; }
  int target() const { return target_; }

 private:
  std::vector<double> ts_;
  std::vector<cplx> zs_, dzs_;
  cplx x_{}, y_{};
  double lambda_x_ = 0.0, lambda_y_ = 0.0;
  double theta_ = 0.0;
  int source_ = -1, target_ = -1;
};

struct FlowDiagnostics {
  double conserved_drift = 0.0;
  double segment_deviation = 0.0;
  double speed_law_deviation = 0.0;  // sup |D4(F o gamma) - rho e^{i theta}| / (1 + rho)
  bool sigma_monotone = false;
};

/* Straightness / speed-law / monotonicity checks on a uniform resampling
 * of the flowline (4th-order stencils). */
FlowDiagnostics flowline_diagnostics(const Polynomial& F, const Flowline& line,
                                     const std::vector<CriticalDatum>& crit);

}  // namespace fsforge
