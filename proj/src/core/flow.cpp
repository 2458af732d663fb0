#include "core/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace fsforge {

namespace {

double point_segment_distance(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double L2 = std::norm(ab);
  if (L2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / L2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double auto_rmax(const std::vector<CriticalDatum>& crit, const ShootingConfig& cfg) {
  if (cfg.r_max > 0.0) return cfg.r_max;
  double m = 0.0;
  for (const auto& c : crit) m = std::max(m, std::abs(c.point));
  return 10.0 * (1.0 + m);
}

}  // namespace

cplx gradient_field(const Polynomial& F, double theta, cplx z) {
  return std::conj(std::polar(1.0, -theta) * F.derivative()(z));
}

double conserved_height(const Polynomial& F, double theta, cplx z) {
  return (std::polar(1.0, -theta) * F(z)).imag();
}

std::array<cplx, 2> unstable_directions(const CriticalDatum& x, double theta) {
  double beta = 0.5 * (theta - std::arg(x.hessian));
  cplx u = std::polar(1.0, beta);
  return {u, -u};
}

IntegrationResult integrate_flow(const Polynomial& F, double theta, cplx z0,
                                 const std::vector<CriticalDatum>& crit,
                                 const ShootingConfig& cfg, const Tolerances& tol) {
  for (const auto& c : crit)
    if (std::abs(z0 - c.point) < 1e-14)
      fail(ErrorCode::precondition, "start point coincides with a critical point");
  Polynomial dF = F.derivative();
  cplx phase = std::polar(1.0, -theta);
  auto field = [&](cplx z) { return std::conj(phase * dF(z)); };
  auto height = [&](cplx z) { return (phase * F(z)).imag(); };
  CaptureSpec cap;
  cap.radius = cfg.capture_radius;
  for (const auto& c : crit) cap.centers.push_back(c.point);
  auto gscale = [&](cplx z) { return std::abs(F(z)); };
  return integrate_ode(field, z0, cfg.rk, cap, auto_rmax(crit, cfg), height, height(z0),
                       tol.conservation, gscale);
}

ConnectionSet find_connections(const Polynomial& F, const std::vector<CriticalDatum>& crit,
                               int x, int y, const ShootingConfig& cfg, const Tolerances& tol) {
  const cplx vx = crit[x].value, vy = crit[y].value;
  if (std::abs(vy - vx) < tol.value_separation)
    fail(ErrorCode::degenerate_values, "endpoint values are not separated");
  const double theta = std::arg(vy - vx);
  for (size_t m = 0; m < crit.size(); ++m) {
    if (static_cast<int>(m) == x || static_cast<int>(m) == y) continue;
    if (point_segment_distance(crit[m].value, vx, vy) < tol.value_separation)
      fail(ErrorCode::interior_critical_value,
           "critical value " + std::to_string(m) + " blocks the segment " +
               std::to_string(x) + "->" + std::to_string(y));
  }

  Polynomial dF = F.derivative();
  cplx phase = std::polar(1.0, -theta);
  auto field = [&](cplx z) { return std::conj(phase * dF(z)); };
  auto height = [&](cplx z) { return (phase * F(z)).imag(); };
  const double g_ref = (phase * vx).imag();  // exact conserved value of the ray

  CaptureSpec cap;
  cap.radius = cfg.capture_radius;
  for (const auto& c : crit) cap.centers.push_back(c.point);
  const double r_max = auto_rmax(crit, cfg);

  ConnectionSet out;
  out.theta = theta;
  auto gscale = [&](cplx z) { return std::abs(F(z)); };
  auto dirs = unstable_directions(crit[x], theta);
  for (const cplx& u : dirs) {
    cplx z0 = crit[x].point + cfg.launch_radius * u;
    IntegrationResult run = integrate_ode(field, z0, cfg.rk, cap, r_max, height, g_ref,
                                          tol.conservation, gscale);
    if (run.reason == StopReason::timeout)
      fail(ErrorCode::inconclusive,
           "trajectory from " + std::to_string(x) + " along angle " +
               std::to_string(std::arg(u)) + " exhausted the time budget");
    if (run.reason != StopReason::captured || run.captured_index != y) continue;

    if (run.drift_max >= tol.conservation && tol.conservation > 0)
      fail(ErrorCode::drift_exceeded, "captured trajectory drifted beyond the flowline budget");
    Flowline line;
    line.theta = theta;
    line.source = x;
    line.target = y;
    line.samples = std::move(run.samples);
    line.conserved_drift = run.drift_max;
    line.launch_angle = std::arg(u);
    double dev = 0.0;
    for (const auto& s : line.samples)
      dev = std::max(dev, point_segment_distance(F(s.z), vx, vy));
    line.segment_deviation = dev;
    line.action = flow_action(F, line, crit);
    out.flowlines.push_back(std::move(line));
  }
  out.count_mod2 = static_cast<int>(out.flowlines.size()) % 2;
  return out;
}

double flow_action(const Polynomial& F, const Flowline& line,
                   const std::vector<CriticalDatum>& crit) {
  const cplx x = crit[line.source].point, y = crit[line.target].point;
  const cplx phase = std::polar(1.0, -line.theta);
  const double g_ref = (phase * crit[line.source].value).imag();

  // Liouville term 1/2 Im(conj(gamma) gamma') plus drift penalty, trapezoid.
  double liouville = 0.0, drift = 0.0;
  const auto& s = line.samples;
  auto liou = [](const RkSample& a) { return 0.5 * (std::conj(a.z) * a.dz).imag(); };
  for (size_t i = 0; i + 1 < s.size(); ++i) {
    double h = s[i + 1].t - s[i].t;
    liouville += 0.5 * h * (liou(s[i]) + liou(s[i + 1]));
    double ga = (phase * F(s[i].z)).imag() - g_ref;
    double gb = (phase * F(s[i + 1].z)).imag() - g_ref;
    drift += 0.5 * h * (ga + gb);
  }
  // Exponential tails contribute closed-form Liouville corrections.
  double tail_x = 0.5 * (std::conj(x) * (s.front().z - x)).imag();
  double tail_y = -0.5 * (std::conj(y) * (s.back().z - y)).imag();
  return liouville + tail_x + tail_y - drift;
}

HomBasis hom_basis(const Polynomial& F, const PhaseGeometry& geom,
                   const std::vector<CriticalDatum>& crit, int x, int y,
                   const ShootingConfig& cfg, const Tolerances& tol) {
  HomBasis h;
  if (x == y) {
    h.kind = HomKind::identity;
    return h;
  }
  if (geom.clockwise_angles[x] > geom.clockwise_angles[y]) {
    h.kind = HomKind::zero;
    return h;
  }
  h.kind = HomKind::flowlines;
  h.gens = find_connections(F, crit, x, y, cfg, tol).flowlines;
  return h;
}

FlowlineEval::FlowlineEval(const Polynomial& F, const Flowline& line,
                           const std::vector<CriticalDatum>& crit) {
  source_ = line.source;
  target_ = line.target;
  theta_ = line.theta;
  x_ = crit[line.source].point;
  y_ = crit[line.target].point;
  lambda_x_ = std::abs(crit[line.source].hessian);
  lambda_y_ = std::abs(crit[line.target].hessian);

  const cplx vx = crit[line.source].value, vy = crit[line.target].value;
  const cplx phase = std::polar(1.0, -theta_);
  const double total = std::abs(vy - vx);
  auto sigma = [&](cplx z) { return (phase * (F(z) - vx)).real(); };

  // Center time at the value-segment midpoint.
  double t_mid = line.samples.front().t;
  for (size_t i = 0; i + 1 < line.samples.size(); ++i) {
    double s0 = sigma(line.samples[i].z), s1 = sigma(line.samples[i + 1].z);
    if (s1 >= 0.5 * total) {
      double w = (0.5 * total - s0) / std::max(s1 - s0, 1e-300);
      t_mid = line.samples[i].t + w * (line.samples[i + 1].t - line.samples[i].t);
      break;
    }
  }
  ts_.reserve(line.samples.size());
  zs_.reserve(line.samples.size());
  dzs_.reserve(line.samples.size());
  for (const auto& s : line.samples) {
    ts_.push_back(s.t - t_mid);
    zs_.push_back(s.z);
    dzs_.push_back(s.dz);
  }
}

cplx FlowlineEval::operator()(double t) const {
  if (t <= ts_.front()) return x_ + (zs_.front() - x_) * std::exp(lambda_x_ * (t - ts_.front()));
  if (t >= ts_.back()) return y_ + (zs_.back() - y_) * std::exp(-lambda_y_ * (t - ts_.back()));
  size_t hi = std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin();
  size_t lo = hi - 1;
  double h = ts_[hi] - ts_[lo];
  double u = (t - ts_[lo]) / h;
  double u2 = u * u, u3 = u2 * u;
  double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  return h00 * zs_[lo] + h10 * h * dzs_[lo] + h01 * zs_[hi] + h11 * h * dzs_[hi];
}

FlowDiagnostics flowline_diagnostics(const Polynomial& F, const Flowline& line,
                                     const std::vector<CriticalDatum>& crit) {
  FlowDiagnostics d;
  d.conserved_drift = line.conserved_drift;

  FlowlineEval ev(F, line, crit);
  const cplx vx = crit[line.source].value, vy = crit[line.target].value;
  const cplx phase = std::polar(1.0, -line.theta);
  const double span = ev.t_last() - ev.t_first();
  const int n = std::clamp(static_cast<int>(span / 0.01) + 1, 2001, 6001);
  const double h = span / (n - 1);

  Polynomial dF = F.derivative();
  std::vector<cplx> w(n);
  std::vector<double> rho(n), sig(n);
  for (int i = 0; i < n; ++i) {
    cplx z = ev(ev.t_first() + i * h);
    w[i] = F(z);
    rho[i] = std::norm(dF(z));
    sig[i] = (phase * (w[i] - vx)).real();
    d.segment_deviation = std::max(d.segment_deviation, point_segment_distance(w[i], vx, vy));
  }
  const cplx dir = std::polar(1.0, line.theta);
  for (int i = 2; i < n - 2; ++i) {
    cplx d4 = (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * h);
    double dev = std::abs(d4 - rho[i] * dir) / (1.0 + rho[i]);
    d.speed_law_deviation = std::max(d.speed_law_deviation, dev);
  }
  d.sigma_monotone = true;
  const double slack = 1e-12 * (1.0 + std::abs(vy - vx));
  for (int i = 0; i + 1 < n; ++i)
    if (sig[i + 1] < sig[i] - slack) d.sigma_monotone = false;
  return d;
}

}  // namespace fsforge
