#pragma once
/* Default numerical tolerances.  All are overridable per-call; the CLI
 * exposes --tol-root and --tol-conserve. */

namespace fsforge {

struct Tolerances {
  double root_residual = 1e-12;    // |F'(z)| at accepted critical point
  double value_separation = 1e-9;  // pairwise |v_i - v_j| floor
  double ray_clearance = 1e-9;     // angular clearance from the alpha-ray
  double conservation = 1e-8;      // conserved-drift cap along flowlines
  double segment = 1e-6;           // value-plane straightness cap
};

struct RkSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 0.02;   // caps sample spacing for downstream interpolation
  double min_step = 1e-12;
  double max_time = 200.0;
  double initial_step = 1e-3;
};

struct ShootingConfig {
  double launch_radius = 1e-4;
  double capture_radius = 1e-3;
  double r_max = 0.0;  // 0 => auto: 10 * (1 + max |critical point|)
  RkSettings rk{};
};

}  // namespace fsforge
