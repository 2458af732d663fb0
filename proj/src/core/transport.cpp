#include "core/transport.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace fsforge {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {  // to (-pi, pi]
  a = std::fmod(a, 2 * kPi);
  if (a <= -kPi) a += 2 * kPi;
  if (a > kPi) a -= 2 * kPi;
  return a;
}

double mod_pi(double a) {  // to [0, pi)
  a = std::fmod(a, kPi);
  if (a < 0) a += kPi;
  return a;
}

double line_distance(double a, double b) {  // distance between lines mod pi
  double d = mod_pi(a - b);
  return std::min(d, kPi - d);
}

}  // namespace

Eigen::Matrix2d j_matrix() {
  Eigen::Matrix2d J;
  J << 0, -1, 1, 0;
  return J;
}

Eigen::Matrix2d hessian_form(cplx g2) {
  Eigen::Matrix2d H;
  H << g2.real(), -g2.imag(), -g2.imag(), -g2.real();
  return H;
}

LinearizedSystem linearized_system(const Polynomial& F, const Flowline& line,
                                   const std::vector<CriticalDatum>& crit) {
  LinearizedSystem sys;
  sys.theta = line.theta;
  sys.gamma = FlowlineEval(F, line, crit);
  sys.F = F;
  sys.d2 = F.derivative().derivative();
  sys.source_datum = crit[line.source];
  sys.target_datum = crit[line.target];
  double shift = line.samples.front().t - sys.gamma.t_first();
  sys.sample_times.reserve(line.samples.size());
  for (const auto& s : line.samples) sys.sample_times.push_back(s.t - shift);
  return sys;
}

double distinguished_lagrangian(const CriticalDatum& x, double theta) {
  return mod_pi(0.5 * (kPi + theta - std::arg(x.hessian)));
}

double ascent_line_angle(const CriticalDatum& x, double theta) {
  return mod_pi(0.5 * (theta - std::arg(x.hessian)));
}

LinePath transport_line_generic(const HFun& h, double t0, double t1, double beta0,
                                double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / step)));
  const double dt = (t1 - t0) / n;
  Eigen::Vector2d v(std::cos(beta0), std::sin(beta0));
  LinePath path;
  path.t.reserve(n + 1);
  path.beta.reserve(n + 1);
  path.t.push_back(t0);
  path.beta.push_back(beta0);
  double angle = beta0;
  for (int i = 0; i < n; ++i) {
    double t = t0 + i * dt;
    Eigen::Vector2d k1 = h(t) * v;
    Eigen::Vector2d k2 = h(t + 0.5 * dt) * (v + 0.5 * dt * k1);
    Eigen::Vector2d k3 = h(t + 0.5 * dt) * (v + 0.5 * dt * k2);
    Eigen::Vector2d k4 = h(t + dt) * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    v.normalize();
    double raw = std::atan2(v.y(), v.x());
    double turn = wrap_pi(raw - angle);
    if (std::abs(turn) > kPi / 4)
      fail(ErrorCode::angular_resolution,
           "line turned by " + std::to_string(turn) + " in one step at t=" + std::to_string(t));
    angle += turn;
    path.t.push_back(t0 + (i + 1) * dt);
    path.beta.push_back(angle);
  }
  return path;
}

LinePath transport_line(const LinearizedSystem& sys, double beta0, double step) {
  return transport_line_generic(sys.h_fun(), sys.t_first(), sys.t_last(), beta0, step);
}

LinePath line_angle_ode(const std::function<cplx(double)>& g2, double t0, double t1,
                        double beta0, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / step)));
  const double dt = (t1 - t0) / n;
  auto rhs = [&](double t, double b) {
    return -(g2(t) * std::exp(cplx(0.0, 2.0 * b))).imag();
  };
  LinePath path;
  path.t.push_back(t0);
  path.beta.push_back(beta0);
  double b = beta0;
  for (int i = 0; i < n; ++i) {
    double t = t0 + i * dt;
    double k1 = rhs(t, b);
    double k2 = rhs(t + 0.5 * dt, b + 0.5 * dt * k1);
    double k3 = rhs(t + 0.5 * dt, b + 0.5 * dt * k2);
    double k4 = rhs(t + dt, b + dt * k3);
    b += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    path.t.push_back(t0 + (i + 1) * dt);
    path.beta.push_back(b);
  }
  return path;
}

Eigen::Matrix2d fundamental_matrix(const HFun& h, double t0, double t1, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / step)));
  const double dt = (t1 - t0) / n;
  Eigen::Matrix2d phi = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i) {
    double t = t0 + i * dt;
    Eigen::Matrix2d k1 = h(t) * phi;
    Eigen::Matrix2d k2 = h(t + 0.5 * dt) * (phi + 0.5 * dt * k1);
    Eigen::Matrix2d k3 = h(t + 0.5 * dt) * (phi + 0.5 * dt * k2);
    Eigen::Matrix2d k4 = h(t + dt) * (phi + dt * k3);
    phi += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return phi;
}

namespace {

double cond_bound(const LinearizedSystem& sys, double t0, double t1) {
  const int n = 512;
  const double dt = (t1 - t0) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::abs(sys.g2_at(t0 + i * dt));
  }
  return s * dt;
}

}  // namespace

TransportFrame transport_matrix(const LinearizedSystem& sys, double t0, double t1,
                                double max_log_cond, double step) {
  TransportFrame f;
  f.t0 = t0;
  f.t1 = t1;
  f.log_cond_bound = cond_bound(sys, t0, t1);
  if (f.log_cond_bound > max_log_cond)
    fail(ErrorCode::ill_conditioned,
         "window conditioning bound " + std::to_string(f.log_cond_bound) +
             " exceeds " + std::to_string(max_log_cond) + "; split the window");
  HFun h = sys.h_fun();
  f.phi = fundamental_matrix(h, t0, t1, step);
  f.det_phi = f.phi(0, 0) * f.phi(1, 1) - f.phi(0, 1) * f.phi(1, 0);
  Eigen::Matrix2d J = j_matrix();
  Eigen::Matrix2d dev = f.phi.transpose() * J * f.phi - J;
  f.omega_dev = dev.cwiseAbs().maxCoeff();
  f.path = transport_line_generic(h, t0, t1,
                                  distinguished_lagrangian(sys.source_datum, sys.theta), step);
  return f;
}

std::vector<TransportFrame> transport_chain(const LinearizedSystem& sys,
                                            double max_log_cond, double step) {
  const double t0 = sys.t_first(), t1 = sys.t_last();
  const double total = cond_bound(sys, t0, t1);
  const int parts = std::max(1, static_cast<int>(std::ceil(total / (0.9 * max_log_cond))));

  // Cut points equalize the accumulated |G| measure.
  const int n = 2048;
  const double dt = (t1 - t0) / n;
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    double a = std::abs(sys.g2_at(t0 + (i - 1) * dt));
    double b = std::abs(sys.g2_at(t0 + i * dt));
    cum[i] = cum[i - 1] + 0.5 * dt * (a + b);
  }
  std::vector<double> cuts{t0};
  for (int k = 1; k < parts; ++k) {
    double target = cum[n] * k / parts;
    size_t idx = std::lower_bound(cum.begin(), cum.end(), target) - cum.begin();
    cuts.push_back(t0 + idx * dt);
  }
  cuts.push_back(t1);

  std::vector<TransportFrame> chain;
  for (size_t k = 0; k + 1 < cuts.size(); ++k)
    chain.push_back(transport_matrix(sys, cuts[k], cuts[k + 1], max_log_cond, step));
  return chain;
}

int maslov_index(const std::vector<double>& a, const std::vector<double>& b, double end_tol) {
  if (a.size() != b.size() || a.size() < 2)
    fail(ErrorCode::shape_mismatch, "angle paths must share a length >= 2");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  for (size_t i = 0; i + 1 < d.size(); ++i)
    if (std::abs(d[i + 1] - d[i]) > kPi / 2)
      fail(ErrorCode::angular_resolution, "angle-pair path is undersampled");
  for (double end : {d.front(), d.back()}) {
    double r = std::abs(end / kPi - std::round(end / kPi));
    if (r * kPi < end_tol)
      fail(ErrorCode::endpoint_tangency, "path endpoints are not transverse");
  }
  return static_cast<int>(std::floor(d.back() / kPi)) -
         static_cast<int>(std::floor(d.front() / kPi));
}

NondegeneracyReport nondegenerate_generic(const HFun& h, double t0, double t1,
                                          double t_meet, double gap_tol,
                                          double angle_tol,
                                          const double* velocity_angle) {
  NondegeneracyReport rep;
  auto eig = [](const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (m + m.transpose()));
    return es;  // eigenvalues ascending
  };
  auto ex = eig(h(t0)), ey = eig(h(t1));
  rep.eigen_gap_source = ex.eigenvalues()[1] - ex.eigenvalues()[0];
  rep.eigen_gap_target = ey.eigenvalues()[1] - ey.eigenvalues()[0];
  if (rep.eigen_gap_source < gap_tol || rep.eigen_gap_target < gap_tol) {
    rep.nondegenerate = false;  // no stable/unstable splitting at an endpoint
    return rep;
  }

  // Backward-decaying solutions leave along the positive eigendirection of
  // H(t0); forward-decaying ones arrive along the negative one at t1.
  Eigen::Vector2d ux = ex.eigenvectors().col(1);
  Eigen::Vector2d sy = ey.eigenvectors().col(0);
  const double tm = t_meet;
  LinePath fwd = transport_line_generic(h, t0, tm, std::atan2(ux.y(), ux.x()));
  HFun hrev = [&](double s) { return Eigen::Matrix2d(-h(t1 - s)); };
  LinePath bwd = transport_line_generic(hrev, 0.0, t1 - tm, std::atan2(sy.y(), sy.x()));

  rep.line_mismatch = line_distance(fwd.beta.back(), bwd.beta.back());
  rep.nondegenerate = rep.line_mismatch < angle_tol;
  if (velocity_angle) {
    rep.velocity_mismatch = std::max(line_distance(fwd.beta.back(), *velocity_angle),
                                     line_distance(bwd.beta.back(), *velocity_angle));
    rep.nondegenerate = rep.nondegenerate && rep.velocity_mismatch < angle_tol;
  }
  return rep;
}

NondegeneracyReport nondegenerate(const LinearizedSystem& sys, double angle_tol) {
  if (std::abs(sys.source_datum.hessian) == 0.0 || std::abs(sys.target_datum.hessian) == 0.0)
    fail(ErrorCode::non_morse, "flowline endpoint is degenerate");
  // Meet the forward and backward lines at the centered time t = 0.
  cplx vel = gradient_field(sys.F, sys.theta, sys.gamma(0.0));
  double vel_angle = std::arg(vel);
  return nondegenerate_generic(sys.h_fun(), sys.t_first(), sys.t_last(), 0.0, 1e-6, angle_tol,
                               &vel_angle);
}

GradingDatum absolute_grading(const LinearizedSystem& sys, double lift_source,
                              double lift_target, double step) {
  GradingDatum g;
  g.source = sys.gamma.source();
  g.target = sys.gamma.target();
  g.lift_source = lift_source;
  g.lift_target = lift_target;

  const double beta_x = distinguished_lagrangian(sys.source_datum, sys.theta);
  const double beta_y = distinguished_lagrangian(sys.target_datum, sys.theta);

  auto end_angle = [&](double st) {
    return transport_line(sys, beta_x, st).beta.back();
  };
  const double b_end = end_angle(step);

  // Snap onto the eigenline lattice of the limiting Hessian at the target.
  const cplx g2y = std::polar(1.0, -sys.theta) * sys.target_datum.hessian;
  const double eig = 0.5 * (kPi - std::arg(g2y));
  const double k = std::round((b_end - eig) / (kPi / 2));
  const double b_snap = eig + k * (kPi / 2);
  g.snap_correction = std::abs(b_snap - b_end);
  if (g.snap_correction >= 0.2)
    fail(ErrorCode::inconclusive,
         "transported line is " + std::to_string(g.snap_correction) +
             " rad away from the nearest eigenline at the target");
  const double b_end_half = end_angle(0.5 * step);
  if (std::round((b_end_half - eig) / (kPi / 2)) != k)
    fail(ErrorCode::inconclusive, "eigenline snap changes under step refinement");

  // Close up through the canonical short rotation in (-pi, 0].
  double d = std::fmod(beta_y - b_snap, kPi);
  if (d < 0) d += kPi;
  const double delta = d > 0 ? d - kPi : 0.0;

  g.winding = b_snap - beta_x;
  const double gr = (lift_source + (b_snap - beta_x) + delta - lift_target) / kPi;
  const double gri = std::round(gr);
  if (std::abs(gr - gri) > 1e-6)
    fail(ErrorCode::inconclusive, "grading formula returned non-integer " + std::to_string(gr));
  g.grading = static_cast<int>(gri);
  return g;
}

GradingDatum absolute_grading(const LinearizedSystem& sys, double step) {
  return absolute_grading(sys, distinguished_lagrangian(sys.source_datum, sys.theta),
                          distinguished_lagrangian(sys.target_datum, sys.theta), step);
}

}  // namespace fsforge
