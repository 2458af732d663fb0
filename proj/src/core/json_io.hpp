#pragma once
/* Problem/family file loading, run options, deterministic JSON report
 * builders for every pipeline stage, and atomic file output.  Reports
 * carry an envelope with the version string, the tolerance set and the
 * effective problem, so a report alone reproduces its run. */

#include <cstdint>
#include <string>
#include <utility>

#include <json.hpp>

#include "core/category.hpp"
#include "core/error.hpp"
#include "core/floer.hpp"
#include "core/transport.hpp"

namespace fsforge {

using Json = nlohmann::ordered_json;

/* Problem file: { "coefficients": [[re,im],...] constant-first,
 * "alpha": radians (default pi/2), "translate": [re,im] optional
 * (precompose z -> z + a) }. */
struct ProblemSpec {
  Polynomial F;
  double alpha = 1.5707963267948966;
  std::vector<cplx> coefficients;  // effective (post-translate) coefficients
};

/* Family file: straight-line coefficient path base + t * velocity with a
 * scan window and the outer frame pair whose segment is watched. */
struct FamilySpec {
  CoefficientFamily family;
  double t_before = 0.0, t_after = 1.0;
  std::pair<int, int> frame{0, 2};
};

ProblemSpec problem_from_json(const Json& j);
ProblemSpec load_problem(const std::string& path);
FamilySpec family_from_json(const Json& j);
FamilySpec load_family(const std::string& path);

/* Options shared by all pipelines; absent keys keep defaults.  Accepted
 * keys: alpha, tol_root, tol_conserve, grid [ns,nt], S, T, seed, jobs,
 * pair [i,j] (floer boundary pair), m1 {"i,j": [[0|1]]} supplied counts. */
struct RunOptions {
  Tolerances tol;
  ShootingConfig shoot;
  FloerGrid grid;
  std::pair<int, int> floer_pair{-1, -1};  // -1: first connected directed pair
  std::uint64_t seed = 1;
  int jobs = 1;
  bool have_alpha = false;
  double alpha = 0.0;
  Json m1_supplied;  // object or null
};
RunOptions options_from_json(const Json& j);

Json run_crit(const ProblemSpec& spec, const RunOptions& opt);
Json run_order(const ProblemSpec& spec, const RunOptions& opt);
Json run_flows(const ProblemSpec& spec, const RunOptions& opt);
Json run_grade(const ProblemSpec& spec, const RunOptions& opt);
Json run_floer(const ProblemSpec& spec, const RunOptions& opt);
Json run_category(const ProblemSpec& spec, const RunOptions& opt);
Json run_wallcross(const FamilySpec& spec, const RunOptions& opt);

Json error_json(const Error& e);

/* 2-space indent, trailing newline, no timestamps: byte-identical for
 * identical inputs. */
std::string dump_report(const Json& j);
/* Write via temp file + rename in the target directory. */
void atomic_write(const std::string& path, const std::string& content);
Json read_json_file(const std::string& path);

}  // namespace fsforge
