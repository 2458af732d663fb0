#pragma once
/* Critical data of a polynomial F and the phase geometry of its critical
 * values around a chosen viewing ray: clockwise ordering, convex position,
 * boundary slopes and exceptional angles. */

#include <optional>
#include <vector>

#include "core/poly.hpp"
#include "core/tolerances.hpp"

namespace fsforge {

struct CriticalDatum {
  cplx point;    // z with F'(z) = 0
  cplx value;    // F(z)
  cplx hessian;  // F''(z), nonzero for Morse data
};

/* Roots of F' (companion matrix + Newton polish, Aberth fallback),
 * sorted by (Re, Im) of the point.  Throws NonMorse / DegenerateValues /
 * RootFindingFailed. */
std::vector<CriticalDatum> critical_points(const Polynomial& F,
                                           const Tolerances& tol = {});

struct PhaseGeometry {
  double alpha = 0.0;
  std::vector<double> clockwise_angles;  // per critical index, in (0, 2pi)
  std::vector<int> order;                // critical indices, clockwise from alpha
  bool convex = false;
  int interior_witness = -1;  // index of a non-vertex value, or -1
  std::vector<std::vector<double>> slopes;  // slopes[i][j] = arg(v_j - v_i), j != i
  std::vector<double> exceptional_angles;   // sorted args of critical values
};

/* Throws ValueAtOrigin / ValueOnRay / AngleTie (two angles closer than
 * the clearance). */
PhaseGeometry phase_geometry(const std::vector<CriticalDatum>& crit,
                             double alpha, const Tolerances& tol = {});

/* |F'(z)|^2: the conformal factor, equal to the Poisson bracket
 * {f_theta, g_theta} for every theta. */
double conformal_factor(const Polynomial& F, cplx z);

/* The same bracket evaluated from two independently-formed gradients
 * (g_theta is the theta + pi/2 height function). */
double poisson_bracket(const Polynomial& F, double theta, cplx z);

struct GradientLikeReport {
  double min_bracket = 0.0;
  bool all_positive = false;
  double max_crit_gradient = 0.0;  // max |grad f_theta| over critical points
  double min_sample_crit_distance = 0.0;
};

/* Checks that f_theta decreases along -grad and is stationary exactly at
 * the critical set: bracket > 0 on samples (pre: samples stay margin away
 * from critical points), |grad| ~ 0 at critical points.  Throws
 * NonPositiveBracket / PreconditionViolated. */
GradientLikeReport check_gradient_like(const Polynomial& F, double theta,
                                       const std::vector<cplx>& samples,
                                       const std::vector<CriticalDatum>& crit,
                                       double margin);

/* Internal helpers shared with tests. */
double clockwise_angle_from(double alpha, cplx value);  // in (0, 2pi)
bool point_in_convex_hull(cplx p, const std::vector<cplx>& pts, double eps);
std::vector<int> convex_hull_vertices(const std::vector<cplx>& pts, double eps);

}  // namespace fsforge
