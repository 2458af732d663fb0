#pragma once
/* Discretized Floer/Witten PDE on the rectangle [-S,S]x[-T,T]:
 * central-difference residual of du/ds + i(du/dt - grad f_theta(u)) = 0,
 * Newton solve with a sparse real Jacobian, discrete energies, the
 * energy identity, the holomorphy (maximum-principle companion)
 * diagnostic, rotation covariance, and best-effort m1 parity
 * estimates. */

#include <cstdint>
#include <map>
#include <string>

#include "core/flow.hpp"

namespace fsforge {

struct FloerGrid {
  double S = 4.5, T = 4.5;
  int ns = 64, nt = 64;
  double hs() const { return 2.0 * S / (ns - 1); }
  double ht() const { return 2.0 * T / (nt - 1); }
  double s_at(int i) const { return -S + i * hs(); }
  double t_at(int j) const { return -T + j * ht(); }
};

struct Field {
  int ns = 0, nt = 0;
  std::vector<cplx> v;  // row-major: v[i * nt + j], i = s index
  Field() = default;
  Field(int ns_, int nt_) : ns(ns_), nt(nt_), v(size_t(ns_) * nt_, cplx(0, 0)) {}
  cplx& at(int i, int j) { return v[size_t(i) * nt + j]; }
  cplx at(int i, int j) const { return v[size_t(i) * nt + j]; }
};

struct FloerProblem {
  Polynomial F;
  double theta = 0.0;
  FlowlineEval gamma0, gamma1;  // left / right boundary flowlines
  cplx x0{}, x1{};              // bottom / top asymptotic critical points
  FloerGrid grid;
};

/* Validates the shared angle and endpoints of the boundary flowlines and
 * the minimum grid size.  Throws PreconditionViolated. */
FloerProblem make_floer_problem(const Polynomial& F, double theta,
                                const Flowline& g0, const Flowline& g1,
                                const std::vector<CriticalDatum>& crit,
                                const FloerGrid& grid);

/* Dirichlet boundary data: left/right columns from the flowlines, bottom/
 * top rows the critical constants with a cosine ramp over 5 cells into the
 * corner values. */
Field boundary_data(const FloerProblem& p);

/* Blend (1-sigma(s)) gamma0(t) + sigma(s) gamma1(t), boundary rows/columns
 * overwritten by boundary_data. */
Field initial_guess(const FloerProblem& p);

/* Central-difference residual at interior nodes (boundary entries zero).
 * Throws ShapeMismatch. */
Field residual(const FloerProblem& p, const Field& u);
double residual_l2(const Field& r);

struct FloerField {
  Field values;
  double residual_norm = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SolveOptions {
  int max_iterations = 50;
  double tol_factor = 1e-8;  // converged at residual_norm < tol_factor * sqrt(ns nt)
  const Field* start = nullptr;  // optional replacement for the default guess
};

/* Newton iteration on the square interior system with line search.
 * Throws NoConvergence / DivergedField. */
FloerField solve(const FloerProblem& p, const SolveOptions& opt = {});

/* Trapezoid quadrature of 1/2 (|du/ds|^2 + |du/dt - grad f|^2). */
double energy(const FloerProblem& p, const Field& u);

/* Plain Dirichlet-type energy 1/2 (|du/ds|^2 + |du/dt|^2) truncated to the
 * centered square of half-width lambda; grows linearly in lambda on strip
 * solutions and is reported, never asserted. */
double plain_energy(const FloerProblem& p, const Field& u, double lambda);

struct EnergyIdentityReport {
  double energy = 0.0;
  double action0 = 0.0, action1 = 0.0;
  double gap = 0.0;  // |energy - (action1 - action0)|
  double tol = 0.0;
  bool pass = false;
};
EnergyIdentityReport energy_identity_check(const FloerProblem& p, const FloerField& f,
                                           double action0, double action1,
                                           double tol_scale = 1e-3);

struct HolomorphyReport {
  int admissible_nodes = 0;   // interior nodes with rho(u) > floor
  double rho_floor = 0.0;
  cplx c_mean{};              // mean of (F'(u) dbar_h u) / rho(u)
  double c_max_dev = 0.0;     // sup |c - c_mean| over admissible nodes
  cplx c_expected{};          // (i/2) e^{i theta}
  double c_expected_dev = 0.0;
  double sup_interior_v = 0.0, sup_boundary_v = 0.0;  // |F o u|, informational
  bool pass = false;
  std::string note;
};
/* The proof identity dbar(F o u) = rho(u) * c with constant c; the
 * discrete transcription uses the chain rule F'(u) * dbar_h u so the
 * identity transfers exactly on solved fields. */
HolomorphyReport holomorphy_diagnostic(const FloerProblem& p, const Field& u,
                                       double rho_floor = 0.1, double tol = 1e-4);

struct RotationReport {
  double phi = 0.0;
  double base_residual_sup = 0.0;      // sup |R| on the original frame
  double frame_residual_sup = 0.0;     // sup |R'| with rotated-frame stencils
  double frame_covariance_dev = 0.0;   // sup |R' - e^{i phi} R| (algebraic identity)
  double resample_residual_sup = 0.0;  // bilinear-resample route
  bool resample_exact = false;         // node-to-node mapping (phi mult. of pi/2, square grid)
  double resample_bound = 0.0;         // first-order bound C (hs + ht)
  bool resample_within_bound = false;
  double witten_agreement_max = 0.0;   // two-route residual agreement, random nodes
  bool pass = false;
};
/* Covariance under z' = e^{i phi} z with F replaced by e^{-i phi} F:
 * rotated-frame directional stencils at the original nodes satisfy
 * R' = e^{i phi} R identically; the literal resample route carries the
 * O(h) interpolation penalty and is held to a first-order bound. */
RotationReport rotation_covariance_check(const FloerProblem& p, const Field& u,
                                         double phi, std::uint64_t seed = 1,
                                         double tol = 1e-4);

struct M1Options {
  std::map<std::pair<int, int>, int> supplied;  // (row, col) -> prescribed count
  bool attempt_solves = false;
  FloerGrid grid{};
  int seeds = 3;
  std::uint64_t seed = 7;
};
struct M1Entry {
  int row = 0, col = 0;  // target, source generator indices
  int count_mod2 = 0;
  char confidence = 'L';  // 'H' only when stable across refinement
  std::string note;
};
struct M1Report {
  int rank = 0;
  std::vector<std::vector<int>> matrix;  // rank x rank over F2
  std::vector<M1Entry> entries;          // attempted grading-difference-1 pairs
  std::vector<std::string> notes;
};
/* Best-effort parity counts between generators of one Hom space; only
 * grading-difference-1 pairs are attempted, supplied counts pass through,
 * solver failures are recorded per seed and never fatal. */
M1Report m1_estimate(const Polynomial& F, const std::vector<CriticalDatum>& crit,
                     const std::vector<Flowline>& gens,
                     const std::vector<int>& gradings, const M1Options& opts = {});

}  // namespace fsforge
