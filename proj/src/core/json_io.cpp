#include "core/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/log.hpp"
#include "core/parallel.hpp"
#include "core/version.hpp"

namespace fsforge {

namespace {

Json jc(cplx z) { return Json::array({z.real(), z.imag()}); }

Json carray(const std::vector<cplx>& v) {
  Json a = Json::array();
  for (cplx z : v) a.push_back(jc(z));
  return a;
}

cplx parse_cplx(const Json& v, const std::string& what) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx(v[0].get<double>(), v[1].get<double>());
  fail(ErrorCode::parse_error, what + ": expected a number or [re, im]");
}

std::vector<cplx> parse_cplx_list(const Json& v, const std::string& what) {
  if (!v.is_array() || v.empty())
    fail(ErrorCode::parse_error, what + ": expected a non-empty array");
  std::vector<cplx> out;
  out.reserve(v.size());
  for (size_t k = 0; k < v.size(); ++k)
    out.push_back(parse_cplx(v[k], what + "[" + std::to_string(k) + "]"));
  return out;
}

double parse_number(const Json& v, const std::string& what) {
  if (!v.is_number()) fail(ErrorCode::parse_error, what + ": expected a number");
  return v.get<double>();
}

double effective_alpha(const ProblemSpec& spec, const RunOptions& opt) {
  return opt.have_alpha ? opt.alpha : spec.alpha;
}

Json tolerances_json(const RunOptions& opt) {
  Json t = Json::object();
  t["root_residual"] = opt.tol.root_residual;
  t["value_separation"] = opt.tol.value_separation;
  t["ray_clearance"] = opt.tol.ray_clearance;
  t["conservation"] = opt.tol.conservation;
  t["segment"] = opt.tol.segment;
  t["rk_abs_tol"] = opt.shoot.rk.abs_tol;
  t["rk_rel_tol"] = opt.shoot.rk.rel_tol;
  t["launch_radius"] = opt.shoot.launch_radius;
  t["capture_radius"] = opt.shoot.capture_radius;
  return t;
}

Json envelope(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = Json::object();
  j["version"] = kVersion;
  Json p = Json::object();
  p["coefficients"] = carray(spec.coefficients);
  p["alpha"] = effective_alpha(spec, opt);
  j["problem"] = std::move(p);
  j["tolerances"] = tolerances_json(opt);
  j["seed"] = opt.seed;
  return j;
}

Json family_envelope(const FamilySpec& spec, const RunOptions& opt) {
  Json j = Json::object();
  j["version"] = kVersion;
  Json f = Json::object();
  f["coefficients"] = carray(spec.family.base);
  f["velocity"] = carray(spec.family.velocity);
  f["t_before"] = spec.t_before;
  f["t_after"] = spec.t_after;
  f["frame"] = Json::array({spec.frame.first, spec.frame.second});
  j["family"] = std::move(f);
  j["tolerances"] = tolerances_json(opt);
  j["seed"] = opt.seed;
  return j;
}

Json samples_json(const std::vector<RkSample>& ss) {
  Json a = Json::array();
  const size_t n = ss.size();
  if (n == 0) return a;
  const size_t stride = n > 257 ? (n + 255) / 256 : 1;
  size_t last_pushed = 0;
  for (size_t k = 0; k < n; k += stride) {
    a.push_back(Json::array({ss[k].t, ss[k].z.real(), ss[k].z.imag()}));
    last_pushed = k;
  }
  if (last_pushed != n - 1)
    a.push_back(Json::array({ss[n - 1].t, ss[n - 1].z.real(), ss[n - 1].z.imag()}));
  return a;
}

std::string pair_key(int i, int j) {
  return std::to_string(i) + "," + std::to_string(j);
}

Json counts_json(const std::map<std::pair<int, int>, int>& m) {
  Json o = Json::object();
  for (const auto& [k, v] : m) o[pair_key(k.first, k.second)] = v;
  return o;
}

/* Directed pairs (x, y) with x strictly before y in the clockwise order. */
std::vector<std::pair<int, int>> directed_pairs(const PhaseGeometry& geom) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(geom.order.size());
  for (int pi = 0; pi < n; ++pi)
    for (int pj = pi + 1; pj < n; ++pj)
      out.emplace_back(geom.order[pi], geom.order[pj]);
  return out;
}

std::pair<int, int> parse_pair_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos)
    fail(ErrorCode::parse_error, "m1 key must look like \"i,j\": " + key);
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::parse_error, "m1 key must look like \"i,j\": " + key);
  }
}

}  // namespace

ProblemSpec problem_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::parse_error, "problem: expected a JSON object");
  if (!j.contains("coefficients"))
    fail(ErrorCode::parse_error, "problem: missing \"coefficients\"");
  ProblemSpec spec;
  std::vector<cplx> coeffs = parse_cplx_list(j["coefficients"], "coefficients");
  Polynomial F(coeffs);
  if (j.contains("translate")) {
    const cplx a = parse_cplx(j["translate"], "translate");
    F = F.translated(a);
  }
  if (F.degree() < 2)
    fail(ErrorCode::parse_error, "problem: polynomial degree must be at least 2");
  if (j.contains("alpha")) spec.alpha = parse_number(j["alpha"], "alpha");
  spec.coefficients = F.coefficients();
  spec.F = std::move(F);
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  return problem_from_json(read_json_file(path));
}

FamilySpec family_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::parse_error, "family: expected a JSON object");
  for (const char* key : {"coefficients", "velocity", "t_before", "t_after"})
    if (!j.contains(key))
      fail(ErrorCode::parse_error, std::string("family: missing \"") + key + "\"");
  FamilySpec spec;
  spec.family.base = parse_cplx_list(j["coefficients"], "coefficients");
  spec.family.velocity = parse_cplx_list(j["velocity"], "velocity");
  spec.t_before = parse_number(j["t_before"], "t_before");
  spec.t_after = parse_number(j["t_after"], "t_after");
  if (j.contains("frame")) {
    const Json& f = j["frame"];
    if (!f.is_array() || f.size() != 2 || !f[0].is_number_integer() ||
        !f[1].is_number_integer())
      fail(ErrorCode::parse_error, "family: \"frame\" must be [i, k]");
    spec.frame = {f[0].get<int>(), f[1].get<int>()};
    if (spec.frame.first == spec.frame.second)
      fail(ErrorCode::parse_error, "family: frame labels must differ");
  }
  return spec;
}

FamilySpec load_family(const std::string& path) {
  return family_from_json(read_json_file(path));
}

RunOptions options_from_json(const Json& j) {
  RunOptions opt;
  if (j.is_null()) return opt;
  if (!j.is_object()) fail(ErrorCode::parse_error, "options: expected a JSON object");
  if (j.contains("alpha")) {
    opt.alpha = parse_number(j["alpha"], "alpha");
    opt.have_alpha = true;
  }
  if (j.contains("tol_root")) {
    opt.tol.root_residual = parse_number(j["tol_root"], "tol_root");
    if (!(opt.tol.root_residual > 0))
      fail(ErrorCode::invalid_argument, "tol_root must be positive");
  }
  if (j.contains("tol_conserve")) {
    opt.tol.conservation = parse_number(j["tol_conserve"], "tol_conserve");
    if (!(opt.tol.conservation > 0))
      fail(ErrorCode::invalid_argument, "tol_conserve must be positive");
  }
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() ||
        !g[1].is_number_integer())
      fail(ErrorCode::parse_error, "options: \"grid\" must be [ns, nt]");
    opt.grid.ns = g[0].get<int>();
    opt.grid.nt = g[1].get<int>();
    if (opt.grid.ns < 16 || opt.grid.nt < 16)
      fail(ErrorCode::invalid_argument, "grid must be at least 16x16");
  }
  if (j.contains("S")) opt.grid.S = parse_number(j["S"], "S");
  if (j.contains("T")) opt.grid.T = parse_number(j["T"], "T");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer())
      fail(ErrorCode::parse_error, "options: \"seed\" must be an integer");
    opt.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_integer() || j["jobs"].get<int>() < 1)
      fail(ErrorCode::invalid_argument, "jobs must be a positive integer");
    opt.jobs = j["jobs"].get<int>();
  }
  if (j.contains("pair")) {
    const Json& p = j["pair"];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
        !p[1].is_number_integer())
      fail(ErrorCode::parse_error, "options: \"pair\" must be [i, j]");
    opt.floer_pair = {p[0].get<int>(), p[1].get<int>()};
  }
  if (j.contains("m1")) {
    if (!j["m1"].is_object()) fail(ErrorCode::parse_error, "options: \"m1\" must be an object");
    opt.m1_supplied = j["m1"];
  }
  return opt;
}

Json run_crit(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  Json list = Json::array();
  for (size_t k = 0; k < crit.size(); ++k) {
    Json c = Json::object();
    c["index"] = static_cast<int>(k);
    c["point"] = jc(crit[k].point);
    c["value"] = jc(crit[k].value);
    c["hessian"] = jc(crit[k].hessian);
    list.push_back(std::move(c));
  }
  j["critical_points"] = std::move(list);
  return j;
}

Json run_order(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  const auto geom = phase_geometry(crit, effective_alpha(spec, opt), opt.tol);
  j["clockwise_angles"] = geom.clockwise_angles;
  j["order"] = geom.order;
  j["convex"] = geom.convex;
  j["interior_witness"] = geom.interior_witness;
  j["slopes"] = geom.slopes;
  std::vector<cplx> values;
  values.reserve(crit.size());
  for (const auto& c : crit) values.push_back(c.value);
  Json exc = Json::array();
  for (const auto& e : exceptional_angles(values)) {
    Json o = Json::object();
    o["angle"] = e.angle;
    o["moving"] = e.moving;
    o["order_before"] = e.order_before;
    o["order_after"] = e.order_after;
    exc.push_back(std::move(o));
  }
  j["exceptional"] = std::move(exc);
  return j;
}

Json run_flows(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  const auto geom = phase_geometry(crit, effective_alpha(spec, opt), opt.tol);
  const auto pairs = directed_pairs(geom);
  std::vector<Json> slots(pairs.size());
  parallel_for_slots(static_cast<int>(pairs.size()), opt.jobs, [&](int k) {
    const auto [x, y] = pairs[static_cast<size_t>(k)];
    const auto cs = find_connections(spec.F, crit, x, y, opt.shoot, opt.tol);
    Json p = Json::object();
    p["source"] = x;
    p["target"] = y;
    p["theta"] = cs.theta;
    p["count_mod2"] = cs.count_mod2;
    Json lines = Json::array();
    for (const auto& line : cs.flowlines) {
      Json l = Json::object();
      l["drift"] = line.conserved_drift;
      l["deviation"] = line.segment_deviation;
      l["action"] = line.action;
      l["launch_angle"] = line.launch_angle;
      l["samples"] = samples_json(line.samples);
      lines.push_back(std::move(l));
    }
    p["flowlines"] = std::move(lines);
    slots[static_cast<size_t>(k)] = std::move(p);
  });
  std::vector<cplx> values;
  values.reserve(crit.size());
  for (const auto& c : crit) values.push_back(c.value);
  j["critical_values"] = carray(values);
  j["hull"] = convex_hull_vertices(values, 1e-12);
  j["pairs"] = slots;
  return j;
}

Json run_grade(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  const auto geom = phase_geometry(crit, effective_alpha(spec, opt), opt.tol);
  const auto pairs = directed_pairs(geom);
  std::vector<Json> slots(pairs.size());
  parallel_for_slots(static_cast<int>(pairs.size()), opt.jobs, [&](int k) {
    const auto [x, y] = pairs[static_cast<size_t>(k)];
    const auto cs = find_connections(spec.F, crit, x, y, opt.shoot, opt.tol);
    Json p = Json::object();
    p["pair"] = Json::array({x, y});
    p["theta"] = cs.theta;
    p["count_mod2"] = cs.count_mod2;
    Json gens = Json::array();
    for (const auto& line : cs.flowlines) {
      const auto sys = linearized_system(spec.F, line, crit);
      const auto gd = absolute_grading(sys);
      Json g = Json::object();
      g["grading"] = gd.grading;
      g["action"] = line.action;
      g["winding"] = gd.winding;
      gens.push_back(std::move(g));
    }
    p["generators"] = std::move(gens);
    slots[static_cast<size_t>(k)] = std::move(p);
  });
  j["convention"] = GradingDatum{}.convention;
  j["pairs"] = slots;
  return j;
}

Json run_floer(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  const auto geom = phase_geometry(crit, effective_alpha(spec, opt), opt.tol);
  int x = opt.floer_pair.first, y = opt.floer_pair.second;
  ConnectionSet cs;
  if (x >= 0 && y >= 0) {
    const int n = static_cast<int>(crit.size());
    if (x >= n || y >= n || x == y)
      fail(ErrorCode::invalid_argument, "pair indices out of range");
    cs = find_connections(spec.F, crit, x, y, opt.shoot, opt.tol);
  } else {
    bool found = false;
    for (const auto& [a, b] : directed_pairs(geom)) {
      const auto trial = find_connections(spec.F, crit, a, b, opt.shoot, opt.tol);
      if (!trial.flowlines.empty()) {
        x = a;
        y = b;
        cs = trial;
        found = true;
        break;
      }
    }
    if (!found)
      fail(ErrorCode::precondition, "no connected pair available for the strip solve");
  }
  if (cs.flowlines.empty())
    fail(ErrorCode::precondition, "selected pair has no flowlines");
  const Flowline& g0 = cs.flowlines.front();
  const Flowline& g1 = cs.flowlines.back();
  const auto p = make_floer_problem(spec.F, cs.theta, g0, g1, crit, opt.grid);
  const auto f = solve(p);
  const auto eid = energy_identity_check(p, f, g0.action, g1.action);
  const auto hol = holomorphy_diagnostic(p, f.values);
  const auto res = residual(p, f.values);

  j["source"] = x;
  j["target"] = y;
  j["theta"] = cs.theta;
  Json grid = Json::object();
  grid["S"] = opt.grid.S;
  grid["T"] = opt.grid.T;
  grid["ns"] = opt.grid.ns;
  grid["nt"] = opt.grid.nt;
  j["grid"] = std::move(grid);
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  j["residual_norm"] = f.residual_norm;
  j["energy"] = f.energy;
  Json e = Json::object();
  e["energy"] = eid.energy;
  e["action0"] = eid.action0;
  e["action1"] = eid.action1;
  e["gap"] = eid.gap;
  e["tol"] = eid.tol;
  e["pass"] = eid.pass;
  j["energy_identity"] = std::move(e);
  Json h = Json::object();
  h["admissible_nodes"] = hol.admissible_nodes;
  h["rho_floor"] = hol.rho_floor;
  h["c_mean"] = jc(hol.c_mean);
  h["c_max_dev"] = hol.c_max_dev;
  h["c_expected"] = jc(hol.c_expected);
  h["c_expected_dev"] = hol.c_expected_dev;
  h["sup_interior_v"] = hol.sup_interior_v;
  h["sup_boundary_v"] = hol.sup_boundary_v;
  h["pass"] = hol.pass;
  h["note"] = hol.note;
  j["holomorphy"] = std::move(h);
  j["values"] = carray(f.values.v);
  Json ar = Json::array();
  for (cplx r : res.v) ar.push_back(std::abs(r));
  j["abs_residual"] = std::move(ar);
  return j;
}

Json run_category(const ProblemSpec& spec, const RunOptions& opt) {
  Json j = envelope(spec, opt);
  const auto crit = critical_points(spec.F, opt.tol);
  const auto geom = phase_geometry(crit, effective_alpha(spec, opt), opt.tol);
  const auto pairs = directed_pairs(geom);

  struct PairResult {
    std::vector<GeneratorInfo> gens;
  };
  std::vector<PairResult> slots(pairs.size());
  parallel_for_slots(static_cast<int>(pairs.size()), opt.jobs, [&](int k) {
    const auto [x, y] = pairs[static_cast<size_t>(k)];
    const auto cs = find_connections(spec.F, crit, x, y, opt.shoot, opt.tol);
    auto& out = slots[static_cast<size_t>(k)].gens;
    int idx = 0;
    for (const auto& line : cs.flowlines) {
      const auto sys = linearized_system(spec.F, line, crit);
      const auto gd = absolute_grading(sys);
      GeneratorInfo g;
      g.label = pair_key(x, y) + "#" + std::to_string(idx++);
      g.grading = gd.grading;
      g.action = line.action;
      g.provenance = "flow-module shooting";
      out.push_back(std::move(g));
    }
  });

  AssembleInput in;
  for (size_t k = 0; k < pairs.size(); ++k) in.homs[pairs[k]] = slots[k].gens;

  if (opt.m1_supplied.is_object()) {
    for (const auto& [key, mat] : opt.m1_supplied.items()) {
      const auto pr = parse_pair_key(key);
      if (!mat.is_array()) fail(ErrorCode::parse_error, "m1 block must be a matrix");
      const int rows = static_cast<int>(mat.size());
      F2Matrix m(rows, rows);
      std::vector<std::vector<char>> conf(static_cast<size_t>(rows),
                                          std::vector<char>(static_cast<size_t>(rows), 'H'));
      for (int r = 0; r < rows; ++r) {
        const Json& row = mat[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != rows)
          fail(ErrorCode::parse_error, "m1 block must be square");
        for (int c = 0; c < rows; ++c) {
          if (!row[static_cast<size_t>(c)].is_number_integer())
            fail(ErrorCode::parse_error, "m1 entries must be integers");
          m.at(r, c) = static_cast<std::uint8_t>(row[static_cast<size_t>(c)].get<int>() & 1);
        }
      }
      M1Block blk;
      blk.counts = std::move(m);
      blk.confidence = std::move(conf);
      blk.provenance = "supplied";
      in.m1[pr] = std::move(blk);
    }
  }

  const auto data = assemble(geom, in);
  const auto rep = verify_a_infinity(data, 2, false);

  j["objects"] = data.objects;
  Json homs = Json::object();
  Json prov_homs = Json::object();
  const int n = static_cast<int>(crit.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto it = data.homs.find({a, b});
      Json gens = Json::array();
      std::string prov;
      if (it != data.homs.end() && it->second.kind != HomKind::zero) {
        for (const auto& g : it->second.gens) {
          Json o = Json::object();
          o["grading"] = g.grading;
          o["action"] = g.action;
          gens.push_back(std::move(o));
          prov = g.provenance;
        }
      }
      homs[pair_key(a, b)] = std::move(gens);
      if (!prov.empty()) prov_homs[pair_key(a, b)] = prov;
    }
  j["homs"] = std::move(homs);
  Json m1 = Json::object();
  Json prov_m1 = Json::object();
  for (const auto& [key, blk] : data.m1) {
    Json rows = Json::array();
    for (int r = 0; r < blk.counts.rows; ++r) {
      Json row = Json::array();
      for (int c = 0; c < blk.counts.cols; ++c) row.push_back(static_cast<int>(blk.counts.at(r, c)));
      rows.push_back(std::move(row));
    }
    m1[pair_key(key.first, key.second)] = std::move(rows);
    prov_m1[pair_key(key.first, key.second)] = blk.provenance;
  }
  j["m1"] = std::move(m1);
  Json prov = Json::object();
  prov["homs"] = std::move(prov_homs);
  prov["m1"] = std::move(prov_m1);
  j["provenance"] = std::move(prov);
  Json ai = Json::object();
  ai["ok"] = rep.ok;
  ai["relation"] = rep.relation;
  ai["witness"] = rep.witness;
  j["a_infinity"] = std::move(ai);
  return j;
}

Json run_wallcross(const FamilySpec& spec, const RunOptions& opt) {
  Json j = family_envelope(spec, opt);
  const auto ev = deform_and_recount(spec.family, spec.t_before, spec.t_after,
                                     spec.frame, opt.shoot, opt.tol);
  j["moving"] = ev.moving;
  j["frame"] = Json::array({ev.frame.first, ev.frame.second});
  j["t_before"] = ev.t_before;
  j["t_after"] = ev.t_after;
  if (std::isnan(ev.t_cross))
    j["t_cross"] = nullptr;
  else
    j["t_cross"] = ev.t_cross;
  j["crossings"] = ev.crossings;
  j["counts_before"] = counts_json(ev.counts_before);
  j["recounted_counts"] = counts_json(ev.recounted_counts);
  j["predicted_counts"] = counts_json(ev.predicted_counts);
  j["agree"] = ev.agree;
  return j;
}

Json error_json(const Error& e) {
  Json j = Json::object();
  j["version"] = kVersion;
  Json err = Json::object();
  err["code"] = error_name(e.code());
  err["message"] = e.what();
  j["error"] = std::move(err);
  return j;
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::io_error, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorCode::io_error, "rename failed: " + target.string() + ": " + ec.message());
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::io_error, "read failed: " + path);
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, path + ": " + e.what());
  }
}

}  // namespace fsforge
