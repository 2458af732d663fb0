#pragma once
/* Linearized kernel flow along a flowline: v' = H(t) v with
 * H = [[Re G, -Im G], [-Im G, -Re G]], G(t) = e^{-i theta} F''(gamma(t)).
 * H is traceless-symmetric and anticommutes with J = [[0,-1],[1,0]], so
 * the transport is symplectic and line angles evolve by
 * beta' = -Im(G e^{2 i beta}).  Provides fundamental matrices over
 * conditioning-bounded windows, transported line paths, Maslov indices of
 * angle-pair paths, nondegeneracy reports and absolute gradings. */

#include <Eigen/Dense>
#include <functional>

#include "core/flow.hpp"

namespace fsforge {

using HFun = std::function<Eigen::Matrix2d(double)>;

Eigen::Matrix2d j_matrix();
Eigen::Matrix2d hessian_form(cplx g2);  // the matrix H for a given G value

struct LinearizedSystem {
  double theta = 0.0;
  FlowlineEval gamma;
  Polynomial F, d2;       // d2 = F''
  CriticalDatum source_datum, target_datum;
  std::vector<double> sample_times;  // flowline sample times (centered)

  cplx g2_at(double t) const { return std::polar(1.0, -theta) * d2(gamma(t)); }
  Eigen::Matrix2d h_at(double t) const { return hessian_form(g2_at(t)); }
  HFun h_fun() const {
    return [this](double t) { return h_at(t); };
  }
  double t_first() const { return gamma.t_first(); }
  double t_last() const { return gamma.t_last(); }
};

LinearizedSystem linearized_system(const Polynomial& F, const Flowline& line,
                                   const std::vector<CriticalDatum>& crit);

/* Descent (distinguished) line angle at a critical point, in [0, pi):
 * 2 beta = pi + theta - arg F''. */
double distinguished_lagrangian(const CriticalDatum& x, double theta);
/* Ascent line angle, in [0, pi): 2 beta = theta - arg F''. */
double ascent_line_angle(const CriticalDatum& x, double theta);

struct LinePath {
  std::vector<double> t;
  std::vector<double> beta;  // unwrapped continuous angle
};

/* Transport of a line by the kernel flow (renormalized vector RK4).
 * Throws AngularResolutionExceeded if a step turns by more than pi/4. */
LinePath transport_line_generic(const HFun& h, double t0, double t1, double beta0,
                                double step = 0.005);
LinePath transport_line(const LinearizedSystem& sys, double beta0, double step = 0.005);

/* Scalar line-angle ODE route (cross-check for transport_line). */
LinePath line_angle_ode(const std::function<cplx(double)>& g2, double t0, double t1,
                        double beta0, double step = 0.005);

struct TransportFrame {
  double t0 = 0.0, t1 = 0.0;
  Eigen::Matrix2d phi;
  double det_phi = 0.0;
  double omega_dev = 0.0;       // max entry of phi^T J phi - J
  double log_cond_bound = 0.0;  // int |G| dt over the window
  LinePath path;                // transported source distinguished line
};

/* Fundamental matrix over one window.  Throws IllConditioned when the
 * conditioning bound int |G| exceeds max_log_cond. */
TransportFrame transport_matrix(const LinearizedSystem& sys, double t0, double t1,
                                double max_log_cond = 8.0, double step = 0.005);
Eigen::Matrix2d fundamental_matrix(const HFun& h, double t0, double t1,
                                   double step = 0.005);

/* Full-window transport as a product of conditioning-bounded factors. */
std::vector<TransportFrame> transport_chain(const LinearizedSystem& sys,
                                            double max_log_cond = 8.0,
                                            double step = 0.005);

/* Maslov index of a pair of unwrapped angle paths: floor((a-b)/pi) at the
 * end minus at the start.  Throws ShapeMismatch /
 * AngularResolutionExceeded / EndpointTangency. */
int maslov_index(const std::vector<double>& a, const std::vector<double>& b,
                 double end_tol = 1e-9);

struct NondegeneracyReport {
  bool nondegenerate = false;
  double eigen_gap_source = 0.0, eigen_gap_target = 0.0;
  double line_mismatch = 0.0;      // forward vs backward decay line at mid-time
  double velocity_mismatch = 0.0;  // their distance to span(gamma')
};

/* Kernel is exactly span(gamma') iff the endpoint Hessians have a genuine
 * eigenvalue gap and the forward/backward decay lines meet along the
 * velocity.  Synthetic systems (h given directly) can exhibit the
 * degenerate branches. */
NondegeneracyReport nondegenerate_generic(const HFun& h, double t0, double t1,
                                          double t_meet, double gap_tol = 1e-6,
                                          double angle_tol = 1e-3,
                                          const double* velocity_angle = nullptr);
NondegeneracyReport nondegenerate(const LinearizedSystem& sys,
                                  double angle_tol = 1e-3);

struct GradingDatum {
  int source = -1, target = -1;
  double lift_source = 0.0, lift_target = 0.0;
  double winding = 0.0;          // snapped line rotation along the flowline
  double snap_correction = 0.0;  // |snap - raw end angle|, must stay < 0.2
  int grading = 0;
  const char* convention = "lift=[0,pi);short=(-pi,0]";
};

/* Absolute grading of a flowline generator: transport the source descent
 * line, snap onto the eigenline lattice of the limiting Hessian at the
 * target, close up through the canonical short rotation in (-pi, 0].
 * Lifts default to the descent angles in [0, pi); shifting a lift by pi
 * shifts the grading by one.  Throws Inconclusive when the snap exceeds
 * 0.2 rad or is unstable under step refinement. */
GradingDatum absolute_grading(const LinearizedSystem& sys, double lift_source,
                              double lift_target, double step = 0.005);
GradingDatum absolute_grading(const LinearizedSystem& sys, double step = 0.005);

}  // namespace fsforge
