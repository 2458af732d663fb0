#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "core/floer.hpp"
#include "test_util.hpp"

using namespace fsforge;
using namespace testutil;

namespace {
constexpr double kPi = std::numbers::pi;

struct Setup {
  Polynomial F;
  std::vector<CriticalDatum> crit;
  Flowline line;  // quartic 0 -> 1 connection, the trivial-family boundary
};

const Setup& setup() {
  static const Setup s = [] {
    Polynomial F = poly_from(fixtures().at("quartic").at("coefficients"));
    auto crit = critical_points(F);
    ConnectionSet set = find_connections(F, crit, 0, 1);
    REQUIRE(set.flowlines.size() == 1);
    return Setup{F, crit, set.flowlines[0]};
  }();
  return s;
}

FloerProblem trivial_problem(const FloerGrid& grid) {
  const Setup& s = setup();
  return make_floer_problem(s.F, s.line.theta, s.line, s.line, s.crit, grid);
}

/* The s-independent interpolation of the boundary flowline. */
Field interpolated_solution(const FloerProblem& p) {
  Field u(p.grid.ns, p.grid.nt);
  for (int i = 0; i < p.grid.ns; ++i)
    for (int j = 0; j < p.grid.nt; ++j) u.at(i, j) = p.gamma0(p.grid.t_at(j));
  return u;
}

double interior_sup(const Field& r) {
  double m = 0.0;
  for (int i = 1; i < r.ns - 1; ++i)
    for (int j = 1; j < r.nt - 1; ++j) m = std::max(m, std::abs(r.at(i, j)));
  return m;
}
}  // namespace

TEST_CASE("problem construction rejects mixed angles, endpoints and tiny grids") {
  const Setup& s = setup();

  auto c1 = thrown_code([&] {
    make_floer_problem(s.F, 0.0, s.line, s.line, s.crit, FloerGrid{});
  });
  REQUIRE(c1.has_value());
  CHECK(*c1 == ErrorCode::precondition);

  Flowline swapped = s.line;
  std::swap(swapped.source, swapped.target);
  auto c2 = thrown_code([&] {
    make_floer_problem(s.F, s.line.theta, s.line, swapped, s.crit, FloerGrid{});
  });
  REQUIRE(c2.has_value());
  CHECK(*c2 == ErrorCode::precondition);

  FloerGrid tiny;
  tiny.ns = 8;
  auto c3 = thrown_code([&] {
    make_floer_problem(s.F, s.line.theta, s.line, s.line, s.crit, tiny);
  });
  REQUIRE(c3.has_value());
  CHECK(*c3 == ErrorCode::precondition);
}

TEST_CASE("boundary data pins the flowline columns and ramped critical rows") {
  FloerGrid g;
  FloerProblem p = trivial_problem(g);
  Field b = boundary_data(p);

  for (int j = 0; j < g.nt; ++j) {
    CHECK(std::abs(b.at(0, j) - p.gamma0(g.t_at(j))) < 1e-14);
    CHECK(std::abs(b.at(g.ns - 1, j) - p.gamma1(g.t_at(j))) < 1e-14);
  }
  // Row interiors sit at the asymptotic critical constants; the ramp makes
  // the corners agree with the column values.
  CHECK(std::abs(b.at(g.ns / 2, 0) - p.x0) < 1e-14);
  CHECK(std::abs(b.at(g.ns / 2, g.nt - 1) - p.x1) < 1e-14);
  CHECK(std::abs(b.at(0, 0) - p.gamma0(-g.T)) < 1e-12);
  CHECK(std::abs(b.at(g.ns - 1, g.nt - 1) - p.gamma1(g.T)) < 1e-12);
}

TEST_CASE("the blended guess matches the boundary and the trivial interior") {
  FloerGrid g;
  FloerProblem p = trivial_problem(g);
  Field u = initial_guess(p);
  Field b = boundary_data(p);

  for (int j = 0; j < g.nt; ++j) {
    CHECK(std::abs(u.at(0, j) - b.at(0, j)) == 0.0);
    CHECK(std::abs(u.at(g.ns - 1, j) - b.at(g.ns - 1, j)) == 0.0);
  }
  for (int i = 0; i < g.ns; ++i) {
    CHECK(std::abs(u.at(i, 0) - b.at(i, 0)) == 0.0);
    CHECK(std::abs(u.at(i, g.nt - 1) - b.at(i, g.nt - 1)) == 0.0);
  }
  // For equal boundary flowlines every convex blend is the interpolation.
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j)
      CHECK(std::abs(u.at(i, j) - p.gamma0(g.t_at(j))) < 1e-14);
}

TEST_CASE("the discrete operator is second-order accurate on a smooth solution") {
  double sup64, sup128;
  for (int n : {64, 128}) {
    FloerGrid g;
    g.ns = g.nt = n;
    FloerProblem p = trivial_problem(g);
    Field r = residual(p, interpolated_solution(p));
    // Boundary entries of the residual stay zero by construction.
    for (int i = 0; i < g.ns; ++i) {
      CHECK(std::abs(r.at(i, 0)) == 0.0);
      CHECK(std::abs(r.at(i, g.nt - 1)) == 0.0);
    }
    (n == 64 ? sup64 : sup128) = interior_sup(r);
  }
  double order = std::log2(sup64 / sup128);
  CHECK(order > 1.8);
  CHECK(order < 2.3);

  FloerProblem p = trivial_problem(FloerGrid{});
  auto code = thrown_code([&] { residual(p, Field(10, 10)); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::shape_mismatch);
}

TEST_CASE("Newton recovers the strip solution from the blended guess") {
  FloerGrid g;
  FloerProblem p = trivial_problem(g);
  FloerField f = solve(p);
  CHECK(f.converged);
  CHECK(f.iterations <= 50);
  CHECK(f.residual_norm < 1e-8 * std::sqrt(double(g.ns) * g.nt));

  // The solved field stays near the s-independent interpolation.
  Field flat = interpolated_solution(p);
  double dev = 0.0;
  for (size_t k = 0; k < flat.v.size(); ++k)
    dev = std::max(dev, std::abs(f.values.v[k] - flat.v[k]));
  CHECK(dev < 1e-2);

  // A zero-iteration budget cannot reach the tolerance.
  SolveOptions none;
  none.max_iterations = 0;
  auto code = thrown_code([&] { solve(p, none); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::no_convergence);
}

TEST_CASE("the energy of a solved strip equals the action difference") {
  const Setup& s = setup();
  FloerGrid g;
  FloerProblem p = trivial_problem(g);
  FloerField f = solve(p);

  double action = s.line.action;
  EnergyIdentityReport rep = energy_identity_check(p, f, action, action);
  CHECK(rep.pass);
  CHECK(rep.energy == doctest::Approx(f.energy));
  CHECK(rep.gap < rep.tol);
  CHECK(rep.gap < 1e-3 * (1.0 + 2 * std::abs(action)));

  // Doubling the domain and the resolution shrinks the identity gap.
  FloerGrid big;
  big.S = big.T = 2 * g.S;
  big.ns = big.nt = 2 * g.ns;
  FloerProblem p2 = trivial_problem(big);
  FloerField f2 = solve(p2);
  EnergyIdentityReport rep2 = energy_identity_check(p2, f2, action, action);
  CHECK(rep2.pass);
  CHECK(rep2.gap < rep.gap);
}

TEST_CASE("plain energy is reported and grows with the truncation window") {
  FloerProblem p = trivial_problem(FloerGrid{});
  FloerField f = solve(p);
  double e1 = plain_energy(p, f.values, 1.0);
  double e2 = plain_energy(p, f.values, 2.0);
  double e4 = plain_energy(p, f.values, 4.0);
  CHECK(e1 > 0.0);
  CHECK(e2 > e1);
  CHECK(e4 > e2);
}

TEST_CASE("the holomorphy companion is constant on solved fields") {
  FloerProblem p = trivial_problem(FloerGrid{});
  FloerField f = solve(p);

  HolomorphyReport rep = holomorphy_diagnostic(p, f.values);
  CHECK(rep.pass);
  CHECK(rep.admissible_nodes > 0);
  CHECK(rep.c_max_dev < 1e-4);
  CHECK(rep.c_expected_dev < 1e-4);
  CHECK(std::abs(rep.c_expected - cplx(0, 0.5) * std::polar(1.0, p.theta)) == 0.0);
  CHECK(rep.sup_boundary_v >= 0.0);

  // An unreachable conformal floor leaves nothing to measure.
  HolomorphyReport empty = holomorphy_diagnostic(p, f.values, 1e9);
  CHECK(empty.admissible_nodes == 0);
  CHECK(empty.pass);
  CHECK(empty.note == "no admissible nodes");
}

TEST_CASE("the solved field is covariant under coordinate rotation") {
  FloerProblem p = trivial_problem(FloerGrid{});
  FloerField f = solve(p);

  RotationReport zero = rotation_covariance_check(p, f.values, 0.0);
  CHECK(zero.pass);
  CHECK(zero.frame_covariance_dev < 1e-14);
  CHECK(zero.frame_residual_sup == doctest::Approx(zero.base_residual_sup));

  RotationReport quarter = rotation_covariance_check(p, f.values, kPi / 2);
  CHECK(quarter.pass);
  CHECK(quarter.resample_exact);
  CHECK(quarter.resample_residual_sup < 1e-4);
  CHECK(quarter.frame_covariance_dev < 1e-12);
  CHECK(quarter.witten_agreement_max < 1e-12);

  RotationReport sixth = rotation_covariance_check(p, f.values, kPi / 6);
  CHECK(sixth.pass);
  CHECK_FALSE(sixth.resample_exact);
  CHECK(sixth.frame_residual_sup < 1e-4);
  CHECK(sixth.resample_within_bound);
  CHECK(sixth.resample_residual_sup <= sixth.resample_bound);
}

TEST_CASE("parity estimates pass supplied counts through and stay honest") {
  const Setup& s = setup();

  // A single generator admits no grading-difference-1 pairs.
  M1Report lone = m1_estimate(s.F, s.crit, {s.line}, {0});
  CHECK(lone.rank == 1);
  CHECK(lone.entries.empty());
  REQUIRE(lone.notes.size() == 1);
  CHECK(lone.notes[0].find("rank < 2") != std::string::npos);

  // Mismatched grading lists are refused.
  auto code = thrown_code([&] { m1_estimate(s.F, s.crit, {s.line}, {0, 1}); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::shape_mismatch);

  // Supplied counts land verbatim with high confidence, reduced mod 2.
  M1Options with;
  with.supplied[{1, 0}] = 3;
  M1Report sup = m1_estimate(s.F, s.crit, {s.line, s.line}, {0, 1}, with);
  CHECK(sup.rank == 2);
  REQUIRE(sup.entries.size() == 1);
  CHECK(sup.entries[0].row == 1);
  CHECK(sup.entries[0].col == 0);
  CHECK(sup.entries[0].count_mod2 == 1);
  CHECK(sup.entries[0].confidence == 'H');
  CHECK(sup.entries[0].note == "supplied");
  CHECK(sup.matrix[1][0] == 1);
  CHECK(sup.matrix[0][1] == 0);

  // Unattempted entries are marked low-confidence, never guessed.
  M1Report skip = m1_estimate(s.F, s.crit, {s.line, s.line}, {0, 1});
  REQUIRE(skip.entries.size() == 1);
  CHECK(skip.entries[0].count_mod2 == 0);
  CHECK(skip.entries[0].confidence == 'L');
  CHECK(skip.entries[0].note == "not attempted");

  // Attempted solves cluster solutions and report refinement stability.
  M1Options attempt;
  attempt.attempt_solves = true;
  attempt.grid.ns = attempt.grid.nt = 16;
  attempt.seeds = 1;
  M1Report ran = m1_estimate(s.F, s.crit, {s.line, s.line}, {0, 1}, attempt);
  REQUIRE(ran.entries.size() == 1);
  CHECK(ran.entries[0].count_mod2 == 1);
  CHECK(ran.entries[0].confidence == 'H');
  CHECK(ran.entries[0].note.find("clusters") != std::string::npos);
}
