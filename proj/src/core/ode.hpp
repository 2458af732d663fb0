#pragma once
/* Adaptive Dormand-Prince 5(4) integration of an autonomous complex ODE
 * z' = v(z), with capture / runaway / conserved-drift monitors tuned for
 * gradient trajectories. */

#include <functional>
#include <vector>

#include "core/poly.hpp"
#include "core/tolerances.hpp"

namespace fsforge {

struct RkSample {
  double t;
  cplx z;
  cplx dz;  // v(z), exact field value at the node
};

enum class StopReason { captured, runaway, timeout, none };

struct CaptureSpec {
  std::vector<cplx> centers;
  double radius = 1e-3;
  /* Capture requires being inside a ball while |v| decreases over this
   * many consecutive accepted steps, so transversal passes do not count. */
  int confirm_steps = 3;
};

struct IntegrationResult {
  std::vector<RkSample> samples;
  StopReason reason = StopReason::none;
  int captured_index = -1;
  double drift_max = 0.0;
};

/* conserved: scalar invariant of the flow, monitored as |c(z) - c(z0_ref)|;
 * pass drift_tol <= 0 to disable the abort.  The abort compares against
 * drift_tol * max(1, conserved_scale(z)) so escaping trajectories -- where
 * the invariant's magnitude itself blows up -- are not rejected for honest
 * relative error; drift_max records the unscaled drift.  Throws
 * StepFailure when the step size underflows, DriftExceeded when the
 * invariant drifts. */
IntegrationResult integrate_ode(const std::function<cplx(cplx)>& v, cplx z0,
                                const RkSettings& rk, const CaptureSpec& capture,
                                double r_max,
                                const std::function<double(cplx)>& conserved,
                                double conserved_ref, double drift_tol,
                                const std::function<double(cplx)>& conserved_scale = {});

}  // namespace fsforge
