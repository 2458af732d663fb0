#pragma once
/* Directed F2 category assembly over the clockwise object order, A-infinity
 * verification of supplied m1/m2 tables, the Picard-Lefschetz lattice
 * transform, wall-crossing predictions checked against recounts along
 * coefficient deformations, and exceptional viewing angles. */

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "core/f2.hpp"
#include "core/flow.hpp"

namespace fsforge {

struct GeneratorInfo {
  std::string label;
  int grading = 0;
  double action = 0.0;
  std::string provenance;
};

struct HomSpace {
  HomKind kind = HomKind::zero;
  std::vector<GeneratorInfo> gens;  // empty unless kind == flowlines/identity
  int rank() const { return kind == HomKind::zero ? 0 : static_cast<int>(gens.size()); }
};

struct M1Block {
  F2Matrix counts;                            // square, rank x rank
  std::vector<std::vector<char>> confidence;  // 'H' / 'L' per entry
  std::string provenance;
};

struct DirectedCategoryData {
  std::vector<int> objects;  // critical indices in clockwise order
  std::map<std::pair<int, int>, HomSpace> homs;
  std::map<std::pair<int, int>, M1Block> m1;
  std::map<std::tuple<int, int, int>, F2Tensor> m2;  // optional input channel
};

struct AssembleInput {
  std::map<std::pair<int, int>, std::vector<GeneratorInfo>> homs;
  std::map<std::pair<int, int>, M1Block> m1;
  std::map<std::tuple<int, int, int>, F2Tensor> m2;
};

/* Enforces directedness against the clockwise order, installs identity
 * homs, validates that m1 raises grading by exactly one.  Throws
 * DirectednessViolation / PreconditionViolated. */
DirectedCategoryData assemble(const PhaseGeometry& geom, const AssembleInput& in);

struct AInfReport {
  bool ok = true;
  std::string relation;  // "m1m1" | "leibniz" | "unit" when failed
  std::pair<int, int> hom{-1, -1};
  std::tuple<int, int, int> triple{-1, -1, -1};
  int row = -1, col = -1, slot = -1;
  std::string witness;  // human-readable description
};

/* Checks m1^2 = 0 per hom (LOW-confidence entries excluded), and with
 * max_n >= 2 the Leibniz relation and strict unitality on supplied m2
 * tables.  Returns the first failure as a witness; throws RelationFailure
 * instead when throw_on_failure is set. */
AInfReport verify_a_infinity(const DirectedCategoryData& data, int max_n,
                             bool throw_on_failure = false);

struct PLLattice {
  std::vector<std::string> basis;
  Eigen::MatrixXi pairing;  // antisymmetric, zero diagonal
};
PLLattice make_pl_lattice(std::vector<std::string> basis, Eigen::MatrixXi pairing);

/* tau_c(x) = x + <x,c> c with <x,c> = x^T P c. */
Eigen::VectorXi pl_transform(const PLLattice& lat, const Eigen::VectorXi& c,
                             const Eigen::VectorXi& x);

/* n13' = n13 + n12 n23 (mod 2). */
int wall_crossing_predict(int n12, int n23, int n13);

struct CoefficientFamily {
  std::vector<cplx> base, velocity;  // coefficient path base + t * velocity
  Polynomial at(double t) const;
};

struct WallCrossingEvent {
  int moving = -1;               // middle label (in the t_before index scheme)
  std::pair<int, int> frame{-1, -1};
  double t_before = 0.0, t_after = 0.0;
  double t_cross = 0.0;  // NaN when no crossing was detected
  int crossings = 0;
  std::map<std::pair<int, int>, int> counts_before, recounted_counts, predicted_counts;
  bool agree = false;
};

/* Tracks critical-point labels continuously from t_before to t_after,
 * detects crossings of the middle value through the (i,k) value segment by
 * orientation sign change, recounts all ordered pairs at both ends and
 * compares with the mod-2 prediction.  Throws MultipleCrossings /
 * CountUndefined. */
WallCrossingEvent deform_and_recount(const CoefficientFamily& fam, double t_before,
                                     double t_after, std::pair<int, int> pair,
                                     const ShootingConfig& cfg = {},
                                     const Tolerances& tol = {});

struct ExceptionalAngle {
  double angle = 0.0;
  int moving = -1;  // value whose ray the base angle crosses
  std::vector<int> order_before, order_after;
};

/* Arguments of the critical values (where the clockwise order jumps),
 * sorted, each annotated with the order on either side of the ray. */
std::vector<ExceptionalAngle> exceptional_angles(const std::vector<cplx>& values);

}  // namespace fsforge
