#include "core/landscape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace fsforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string cstr(cplx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

/* Backward-error scale sum |c_k| |z|^k for a coefficient vector. */
double eval_scale(const std::vector<cplx>& c, double r) {
  double s = 0.0, rk = 1.0;
  for (const auto& a : c) {
    s += std::abs(a) * rk;
    rk *= r;
  }
  return std::max(s, 1e-300);
}

std::vector<cplx> companion_roots(const std::vector<cplx>& coeff) {
  const int n = static_cast<int>(coeff.size()) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -coeff[i] / coeff[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
  std::vector<cplx> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
  return roots;
}

/* Aberth--Ehrlich simultaneous iteration, used when companion + Newton
 * leaves a residual above tolerance. */
std::vector<cplx> aberth_roots(const std::vector<cplx>& coeff) {
  const int n = static_cast<int>(coeff.size()) - 1;
  double radius = 0.0;
  for (int k = 0; k < n; ++k)
    radius = std::max(radius, std::pow(std::abs(coeff[k] / coeff[n]), 1.0 / (n - k)));
  radius = 2.0 * radius + 1.0;
  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) {
    double a = kTwoPi * k / n + 0.39;  // offset breaks symmetric stalls
    z[k] = radius * cplx(std::cos(a), std::sin(a));
  }
  Polynomial p(coeff), dp = p.derivative();
  for (int iter = 0; iter < 400; ++iter) {
    double moved = 0.0;
    for (int k = 0; k < n; ++k) {
      cplx pv = p(z[k]);
      cplx dv = dp(z[k]);
      if (std::abs(dv) == 0.0) continue;
      cplx w = pv / dv;
      cplx s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      cplx corr = w / (1.0 - w * s);
      z[k] -= corr;
      moved = std::max(moved, std::abs(corr));
    }
    if (moved < 1e-15 * radius) break;
  }
  return z;
}

}  // namespace

std::vector<CriticalDatum> critical_points(const Polynomial& F, const Tolerances& tol) {
  Polynomial dF = F.derivative();
  if (dF.degree() == 0) {
    if (std::abs(dF.coefficients()[0]) == 0.0)
      fail(ErrorCode::invalid_argument, "constant map has no Morse data");
    return {};
  }

  auto polish = [&](cplx z) {
    for (int it = 0; it < 60; ++it) {
      auto j = F.jet(z);
      if (std::abs(j.ddf) == 0.0) break;
      cplx step = j.df / j.ddf;
      z -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
  };
  auto residual_ok = [&](cplx z) {
    double scale = eval_scale(dF.coefficients(), std::abs(z));
    return std::abs(dF(z)) <= tol.root_residual * scale;
  };

  std::vector<cplx> roots = companion_roots(dF.coefficients());
  for (auto& z : roots) z = polish(z);
  bool ok = std::all_of(roots.begin(), roots.end(), residual_ok);
  if (!ok) {
    roots = aberth_roots(dF.coefficients());
    for (auto& z : roots) z = polish(z);
    for (const auto& z : roots)
      if (!residual_ok(z))
        fail(ErrorCode::root_finding_failed,
             "critical point residual " + std::to_string(std::abs(dF(z))) +
                 " at " + cstr(z));
  }

  // Coincident roots are a multiplicity >= 2 signal, as is a vanishing F''.
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) < 1e-8 * (1.0 + std::abs(roots[i])))
        fail(ErrorCode::non_morse, "repeated critical point near " + cstr(roots[i]));

  std::vector<CriticalDatum> out;
  out.reserve(roots.size());
  Polynomial ddF = dF.derivative();
  for (const auto& z : roots) {
    auto j = F.jet(z);
    double h_scale = eval_scale(ddF.coefficients(), std::abs(z));
    if (std::abs(j.ddf) < 1e-8 * h_scale)
      fail(ErrorCode::non_morse, "degenerate critical point at " + cstr(z));
    out.push_back({z, j.f, j.ddf});
  }

  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = i + 1; j < out.size(); ++j)
      if (std::abs(out[i].value - out[j].value) < tol.value_separation)
        fail(ErrorCode::degenerate_values,
             "critical values collide: " + cstr(out[i].value) + " vs " + cstr(out[j].value));

  auto key = [](cplx z) {
    return std::pair<double, double>(std::round(z.real() * 1e12) / 1e12,
                                     std::round(z.imag() * 1e12) / 1e12);
  };
  std::sort(out.begin(), out.end(), [&](const CriticalDatum& a, const CriticalDatum& b) {
    return key(a.point) < key(b.point);
  });
  return out;
}

double clockwise_angle_from(double alpha, cplx value) {
  double a = std::fmod(alpha - std::arg(value), kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

std::vector<int> convex_hull_vertices(const std::vector<cplx>& pts, double eps) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a].real() != pts[b].real()) return pts[a].real() < pts[b].real();
    return pts[a].imag() < pts[b].imag();
  });
  if (n <= 2) return idx;

  auto cross = [&](int o, int a, int b) {
    cplx u = pts[a] - pts[o], v = pts[b] - pts[o];
    return u.real() * v.imag() - u.imag() * v.real();
  };
  // Strict turns only: collinear middle points are dropped, so they are
  // reported as non-vertices.
  auto chain = [&](const std::vector<int>& order) {
    std::vector<int> h;
    for (int i : order) {
      while (h.size() >= 2) {
        int o = h[h.size() - 2], a = h[h.size() - 1];
        double c = cross(o, a, i);
        double scale = std::abs(pts[i] - pts[o]) + 1e-300;
        if (c / scale <= eps)
          h.pop_back();
        else
          break;
      }
      h.push_back(i);
    }
    return h;
  };
  std::vector<int> lower = chain(idx);
  std::vector<int> rev(idx.rbegin(), idx.rend());
  std::vector<int> upper = chain(rev);
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  return lower;  // CCW order
}

bool point_in_convex_hull(cplx p, const std::vector<cplx>& pts, double eps) {
  if (pts.empty()) return false;
  std::vector<int> hull = convex_hull_vertices(pts, eps);
  if (hull.size() == 1) return std::abs(p - pts[hull[0]]) <= eps;
  if (hull.size() == 2) {
    cplx a = pts[hull[0]], b = pts[hull[1]];
    cplx ab = b - a;
    double L2 = std::norm(ab);
    double t = std::clamp(((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / L2, 0.0, 1.0);
    return std::abs(p - (a + t * ab)) <= eps;
  }
  for (size_t i = 0; i < hull.size(); ++i) {
    cplx a = pts[hull[i]], b = pts[hull[(i + 1) % hull.size()]];
    cplx ab = b - a, ap = p - a;
    double c = ab.real() * ap.imag() - ab.imag() * ap.real();
    if (c / (std::abs(ab) + 1e-300) < -eps) return false;
  }
  return true;
}

PhaseGeometry phase_geometry(const std::vector<CriticalDatum>& crit, double alpha,
                             const Tolerances& tol) {
  const int n = static_cast<int>(crit.size());
  PhaseGeometry g;
  g.alpha = alpha;
  g.clockwise_angles.resize(n);
  g.slopes.assign(n, std::vector<double>(n, 0.0));

  for (int i = 0; i < n; ++i) {
    cplx v = crit[i].value;
    if (std::abs(v) < tol.value_separation)
      fail(ErrorCode::value_at_origin, "critical value " + std::to_string(i) + " at the origin");
    double a = clockwise_angle_from(alpha, v);
    if (a < tol.ray_clearance || kTwoPi - a < tol.ray_clearance)
      fail(ErrorCode::value_on_ray,
           "critical value " + std::to_string(i) + " lies on the alpha-ray");
    g.clockwise_angles[i] = a;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(g.clockwise_angles[i] - g.clockwise_angles[j]) < tol.ray_clearance)
        fail(ErrorCode::angle_tie,
             "values " + std::to_string(i) + "," + std::to_string(j) +
                 " are angularly indistinguishable from the base point");

  g.order.resize(n);
  for (int i = 0; i < n; ++i) g.order[i] = i;
  std::sort(g.order.begin(), g.order.end(),
            [&](int a, int b) { return g.clockwise_angles[a] < g.clockwise_angles[b]; });

  std::vector<cplx> values(n);
  for (int i = 0; i < n; ++i) values[i] = crit[i].value;
  if (n <= 2) {
    g.convex = true;
  } else {
    std::vector<int> hull = convex_hull_vertices(values, 1e-12);
    std::vector<char> on_hull(n, 0);
    for (int i : hull) on_hull[i] = 1;
    g.convex = static_cast<int>(hull.size()) == n;
    if (!g.convex)
      for (int i = 0; i < n; ++i)
        if (!on_hull[i]) {
          g.interior_witness = i;
          break;
        }
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.slopes[i][j] = std::arg(values[j] - values[i]);

  g.exceptional_angles.resize(n);
  for (int i = 0; i < n; ++i) {
    double a = std::fmod(std::arg(values[i]), kTwoPi);
    if (a < 0) a += kTwoPi;
    g.exceptional_angles[i] = a;
  }
  std::sort(g.exceptional_angles.begin(), g.exceptional_angles.end());
  return g;
}

double conformal_factor(const Polynomial& F, cplx z) {
  return std::norm(F.derivative()(z));
}

double poisson_bracket(const Polynomial& F, double theta, cplx z) {
  cplx dF = F.derivative()(z);
  cplx gf = std::conj(std::polar(1.0, -theta) * dF);                      // grad f_theta
  cplx gg = std::conj(std::polar(1.0, -(theta + std::numbers::pi / 2)) * dF);  // grad g_theta
  return gf.real() * gg.imag() - gf.imag() * gg.real();
}

GradientLikeReport check_gradient_like(const Polynomial& F, double theta,
                                       const std::vector<cplx>& samples,
                                       const std::vector<CriticalDatum>& crit,
                                       double margin) {
  GradientLikeReport rep;
  rep.min_sample_crit_distance = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    for (const auto& c : crit)
      rep.min_sample_crit_distance = std::min(rep.min_sample_crit_distance, std::abs(s - c.point));
  if (!samples.empty() && !crit.empty() && rep.min_sample_crit_distance <= margin)
    fail(ErrorCode::precondition,
         "sample within margin " + std::to_string(margin) + " of a critical point");

  rep.min_bracket = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    double b = poisson_bracket(F, theta, s);
    rep.min_bracket = std::min(rep.min_bracket, b);
    if (b <= 0.0)
      fail(ErrorCode::non_positive_bracket, "bracket non-positive at " + cstr(s));
  }
  if (samples.empty()) rep.min_bracket = 0.0;
  rep.all_positive = !samples.empty();

  Polynomial dF = F.derivative();
  rep.max_crit_gradient = 0.0;
  for (const auto& c : crit)
    rep.max_crit_gradient =
        std::max(rep.max_crit_gradient, std::abs(std::conj(std::polar(1.0, -theta) * dF(c.point))));
  return rep;
}

}  // namespace fsforge
