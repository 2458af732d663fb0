#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "core/flow.hpp"
#include "test_util.hpp"

using namespace fsforge;
using namespace testutil;

namespace {
constexpr double kPi = std::numbers::pi;

struct Problem {
  Polynomial F;
  std::vector<CriticalDatum> crit;
};

Problem problem(const char* name) {
  Polynomial F = poly_from(fixtures().at(name).at("coefficients"));
  return {F, critical_points(F)};
}

std::pair<int, int> parse_pair(const std::string& key) {
  auto arrow = key.find("->");
  return {std::stoi(key.substr(0, arrow)), std::stoi(key.substr(arrow + 2))};
}
}  // namespace

TEST_CASE("gradient field and conserved height follow the defining formulas") {
  auto [F, crit] = problem("cubic");
  Polynomial dF = F.derivative();
  for (cplx z : {cplx(0.4, -1.2), cplx(2, 3), cplx(-0.1, 0.1)}) {
    for (double theta : {0.0, 1.1, -2.4}) {
      cplx phase = std::polar(1.0, -theta);
      CHECK(std::abs(gradient_field(F, theta, z) - std::conj(phase * dF(z))) < 1e-15);
      CHECK(conserved_height(F, theta, z) == doctest::Approx((phase * F(z)).imag()));
    }
  }
}

TEST_CASE("launch directions reproduce the frozen ascent-ray angles") {
  auto [F, crit] = problem("cubic");
  for (const Json& check : fixtures().at("cubic").at("ascent_checks")) {
    cplx x = as_cplx(check.at("x"));
    double theta = check.at("theta").get<double>();
    double expected = check.at("angle").get<double>();
    int idx = -1;
    for (size_t i = 0; i < crit.size(); ++i)
      if (std::abs(crit[i].point - x) < 1e-9) idx = static_cast<int>(i);
    REQUIRE(idx >= 0);
    auto dirs = unstable_directions(crit[idx], theta);
    // The ray pair spans both signs; the angle is defined modulo pi.
    double gap = std::abs(std::remainder(std::arg(dirs[0]) - expected, kPi));
    CHECK(gap < 1e-12);
    CHECK(std::abs(std::abs(dirs[0]) - 1.0) < 1e-15);
    CHECK(std::abs(dirs[0] + dirs[1]) < 1e-15);
  }
}

TEST_CASE("connection counts, angles and actions match the frozen tables") {
  for (const char* name : {"cubic", "quartic"}) {
    auto [F, crit] = problem(name);
    for (const auto& [key, entry] : fixtures().at(name).at("pairs").items()) {
      auto [x, y] = parse_pair(key);
      CAPTURE(name);
      CAPTURE(key);
      ConnectionSet set = find_connections(F, crit, x, y);
      CHECK(set.count_mod2 == entry.at("count_mod2").get<int>());
      CHECK(static_cast<int>(set.flowlines.size()) == entry.at("count_raw").get<int>());
      CHECK(angle_gap(set.theta, entry.at("theta").get<double>()) < 1e-12);

      const Json& gens = entry.at("generators");
      REQUIRE(set.flowlines.size() == gens.size());
      for (size_t g = 0; g < gens.size(); ++g) {
        const Flowline& line = set.flowlines[g];
        CHECK(line.source == x);
        CHECK(line.target == y);
        CHECK(line.conserved_drift < 1e-8);
        CHECK(line.segment_deviation < 1e-6);
        CHECK(angle_gap(line.launch_angle, gens[g].at("launch_angle").get<double>()) < 1e-9);
        CHECK(std::abs(line.action - gens[g].at("action").get<double>()) < 1e-6);
      }
    }
  }
}

TEST_CASE("flowline diagnostics stay within the straightness and speed budgets") {
  for (const char* name : {"cubic", "quartic"}) {
    auto [F, crit] = problem(name);
    for (const auto& [key, entry] : fixtures().at(name).at("pairs").items()) {
      auto [x, y] = parse_pair(key);
      ConnectionSet set = find_connections(F, crit, x, y);
      for (const Flowline& line : set.flowlines) {
        CAPTURE(name);
        CAPTURE(key);
        FlowDiagnostics d = flowline_diagnostics(F, line, crit);
        CHECK(d.conserved_drift < 1e-8);
        CHECK(d.segment_deviation < 1e-6);
        CHECK(d.speed_law_deviation < 1e-6);
        CHECK(d.sigma_monotone);
      }
    }
  }
}

TEST_CASE("free trajectories are captured or escape as frozen") {
  auto [F, crit] = problem("cubic");
  const Json& cases = fixtures().at("flow_cases");

  const Json& cap = cases.at("capture");
  IntegrationResult captured = integrate_flow(F, cap.at("theta").get<double>(),
                                              as_cplx(cap.at("z0")), crit);
  CHECK(captured.reason == StopReason::captured);
  CHECK(captured.captured_index == cap.at("target").get<int>());
  CHECK(captured.drift_max < 1e-8);
  CHECK(captured.samples.size() > 2);

  const Json& run = cases.at("runaway");
  IntegrationResult escaped = integrate_flow(F, run.at("theta").get<double>(),
                                             as_cplx(run.at("z0")), crit);
  CHECK(escaped.reason == StopReason::runaway);
}

TEST_CASE("flow refusals carry the right typed codes") {
  auto [F, crit] = problem("cubic");

  // Starting exactly at a critical point is a precondition violation.
  auto c0 = thrown_code([&] { integrate_flow(F, 0.0, crit[0].point, crit); });
  REQUIRE(c0.has_value());
  CHECK(*c0 == ErrorCode::precondition);

  // A starved time budget ends in a timeout, reported as inconclusive.
  ShootingConfig starved;
  starved.rk.max_time = 1e-3;
  auto c1 = thrown_code([&] { find_connections(F, crit, 0, 1, starved); });
  REQUIRE(c1.has_value());
  CHECK(*c1 == ErrorCode::inconclusive);

  // An impossible conservation budget trips the drift monitor.  The cubic
  // connection lives on the real axis where the height is identically zero
  // in floating point, so use the quartic, whose flowline genuinely curves.
  auto [Q, qcrit] = problem("quartic");
  Tolerances strict;
  strict.conservation = 1e-18;
  auto c2 = thrown_code([&] { find_connections(Q, qcrit, 0, 1, {}, strict); });
  REQUIRE(c2.has_value());
  CHECK(*c2 == ErrorCode::drift_exceeded);

  // A third critical value on the value segment blocks the count.
  Polynomial blocked({0, cplx(0.1, 0), cplx(-0.5, 0), 0, cplx(0.25, 0)});
  auto bc = critical_points(blocked);
  REQUIRE(bc.size() == 3);
  auto c3 = thrown_code([&] { find_connections(blocked, bc, 0, 1); });
  REQUIRE(c3.has_value());
  CHECK(*c3 == ErrorCode::interior_critical_value);
}

TEST_CASE("hom spaces are directed by the clockwise order") {
  auto [F, crit] = problem("quartic");
  const Json& block = fixtures().at("quartic");
  auto geom = phase_geometry(crit, block.at("alpha").get<double>());
  const auto& order = geom.order;

  for (size_t a = 0; a < order.size(); ++a)
    for (size_t b = 0; b < order.size(); ++b) {
      HomBasis h = hom_basis(F, geom, crit, order[a], order[b]);
      CAPTURE(a);
      CAPTURE(b);
      if (a == b) {
        CHECK(h.kind == HomKind::identity);
      } else if (a > b) {
        CHECK(h.kind == HomKind::zero);
        CHECK(h.gens.empty());
      } else {
        CHECK(h.kind == HomKind::flowlines);
        std::string key = std::to_string(order[a]) + "->" + std::to_string(order[b]);
        CHECK(static_cast<int>(h.gens.size()) ==
              block.at("pairs").at(key).at("count_raw").get<int>());
      }
    }
}

TEST_CASE("action is the regularized Liouville integral of the trajectory") {
  auto [F, crit] = problem("quartic");
  ConnectionSet set = find_connections(F, crit, 0, 1);
  REQUIRE(set.flowlines.size() == 1);
  const Flowline& line = set.flowlines[0];

  // The quadrature lives on the integrator samples, so the action converges
  // under step refinement; the refined value lands on the frozen one well
  // inside the coarse comparison tolerance.
  ShootingConfig tight;
  tight.rk.abs_tol = tight.rk.rel_tol = 1e-12;
  tight.rk.max_step = 0.005;
  ConnectionSet set2 = find_connections(F, crit, 0, 1, tight);
  REQUIRE(set2.flowlines.size() == 1);
  double frozen =
      fixtures().at("quartic").at("pairs").at("0->1").at("generators").at(0).at("action").get<double>();
  CHECK(std::abs(set2.flowlines[0].action - frozen) < 1e-7);
  CHECK(std::abs(line.action - frozen) < 1e-6);

  // Recomputing from the stored samples is idempotent.
  CHECK(flow_action(F, line, crit) == doctest::Approx(line.action));
}

TEST_CASE("flowline evaluator interpolates the samples and decays in the tails") {
  auto [F, crit] = problem("quartic");
  ConnectionSet set = find_connections(F, crit, 0, 2);
  REQUIRE(!set.flowlines.empty());
  const Flowline& line = set.flowlines[0];
  FlowlineEval eval(F, line, crit);

  CHECK(eval.source() == 0);
  CHECK(eval.target() == 2);
  CHECK(std::abs(eval.source_point() - crit[0].point) < 1e-15);
  CHECK(std::abs(eval.target_point() - crit[2].point) < 1e-15);

  // Window endpoints hit the stored samples exactly.
  CHECK(std::abs(eval(eval.t_first()) - line.samples.front().z) < 1e-14);
  CHECK(std::abs(eval(eval.t_last()) - line.samples.back().z) < 1e-14);

  // Inside the window the evaluator satisfies the flow equation.
  double t0 = eval.t_first(), t1 = eval.t_last();
  for (int k = 1; k < 12; ++k) {
    double t = t0 + (t1 - t0) * k / 12.0 + 0.0003;
    double h = 1e-4;
    cplx num = (eval(t + h) - eval(t - h)) / (2 * h);
    cplx want = gradient_field(F, line.theta, eval(t));
    CHECK(std::abs(num - want) < 1e-5);
  }

  // Tails decay exponentially onto the asymptotic points.
  CHECK(std::abs(eval(t0 - 30.0) - crit[0].point) < 1e-10);
  CHECK(std::abs(eval(t1 + 30.0) - crit[2].point) < 1e-10);
  CHECK(std::abs(eval(t0 - 1.0) - crit[0].point) < std::abs(eval(t0) - crit[0].point));
  CHECK(std::abs(eval(t1 + 1.0) - crit[2].point) < std::abs(eval(t1) - crit[2].point));
}
