#include "core/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace fsforge {

namespace {

// Dormand-Prince 5(4) tableau, FSAL.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

IntegrationResult integrate_ode(const std::function<cplx(cplx)>& v, cplx z0,
                                const RkSettings& rk, const CaptureSpec& capture,
                                double r_max,
                                const std::function<double(cplx)>& conserved,
                                double conserved_ref, double drift_tol,
                                const std::function<double(cplx)>& conserved_scale) {
  IntegrationResult res;
  double t = 0.0;
  cplx z = z0;
  cplx k1 = v(z);
  res.samples.push_back({t, z, k1});

  double h = std::min(rk.initial_step, rk.max_step);
  int decreasing_inside = 0;
  double prev_speed = std::abs(k1);
  int prev_ball = -1;

  auto ball_index = [&](cplx p) {
    for (size_t i = 0; i < capture.centers.size(); ++i)
      if (std::abs(p - capture.centers[i]) <= capture.radius) return static_cast<int>(i);
    return -1;
  };

  while (t < rk.max_time) {
    if (h < rk.min_step)
      fail(ErrorCode::step_failure, "step size underflow at t=" + std::to_string(t));
    h = std::min({h, rk.max_step, rk.max_time - t});

    cplx k2 = v(z + h * (a21 * k1));
    cplx k3 = v(z + h * (a31 * k1 + a32 * k2));
    cplx k4 = v(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
    cplx k5 = v(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    cplx k6 = v(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    cplx znew = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    cplx k7 = v(znew);
    cplx err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sc = rk.abs_tol + rk.rel_tol * std::max(std::abs(z), std::abs(znew));
    double err_norm = std::abs(err) / sc;
    if (err_norm > 1.0) {
      h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
      continue;
    }

    t += h;
    z = znew;
    k1 = k7;  // FSAL
    res.samples.push_back({t, z, k1});

    if (drift_tol > 0.0) {
      double d = std::abs(conserved(z) - conserved_ref);
      res.drift_max = std::max(res.drift_max, d);
      double scale = conserved_scale ? std::max(1.0, conserved_scale(z)) : 1.0;
      if (d > drift_tol * scale) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "conserved quantity drifted by %.3e at t=%.4f", d, t);
        fail(ErrorCode::drift_exceeded, msg);
      }
    }

    if (std::abs(z) > r_max) {
      res.reason = StopReason::runaway;
      return res;
    }

    int ball = ball_index(z);
    double speed = std::abs(k1);
    if (ball >= 0 && ball == prev_ball && speed < prev_speed)
      ++decreasing_inside;
    else
      decreasing_inside = 0;
    prev_ball = ball;
    prev_speed = speed;
    if (ball >= 0 && decreasing_inside >= capture.confirm_steps) {
      res.reason = StopReason::captured;
      res.captured_index = ball;
      return res;
    }

    double grow = std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2, 5.0);
    h *= grow;
  }
  res.reason = StopReason::timeout;
  return res;
}

}  // namespace fsforge
