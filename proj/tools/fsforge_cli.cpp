/* Command-line surface: parse a problem/family file, run one pipeline
 * through the C API, write the JSON report (and derived SVG where
 * applicable) atomically into the output directory, and echo the report
 * to stdout.  Exit codes: 0 success, 2 domain error, 1 I/O, parse, or
 * usage error. */

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsforge/fsforge.h"

namespace {

struct CliOptions {
  std::string file;
  std::string outdir = ".";
  double alpha = 0.0;
  bool have_alpha = false;
  double tol_root = 0.0;
  bool have_tol_root = false;
  double tol_conserve = 0.0;
  bool have_tol_conserve = false;
  std::string grid;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<int> pair;
};

bool parse_grid(const std::string& s, int& ns, int& nt) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    ns = std::stoi(s.substr(0, x));
    nt = std::stoi(s.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return ns > 0 && nt > 0;
}

std::string compose_options(const CliOptions& o, bool& bad_grid) {
  char buf[128];
  std::string j = "{";
  std::snprintf(buf, sizeof(buf), "\"seed\":%" PRIu64 ",\"jobs\":%d", o.seed, o.jobs);
  j += buf;
  if (o.have_alpha) {
    std::snprintf(buf, sizeof(buf), ",\"alpha\":%.17g", o.alpha);
    j += buf;
  }
  if (o.have_tol_root) {
    std::snprintf(buf, sizeof(buf), ",\"tol_root\":%.17g", o.tol_root);
    j += buf;
  }
  if (o.have_tol_conserve) {
    std::snprintf(buf, sizeof(buf), ",\"tol_conserve\":%.17g", o.tol_conserve);
    j += buf;
  }
  if (!o.grid.empty()) {
    int ns = 0, nt = 0;
    if (!parse_grid(o.grid, ns, nt)) {
      bad_grid = true;
    } else {
      std::snprintf(buf, sizeof(buf), ",\"grid\":[%d,%d]", ns, nt);
      j += buf;
    }
  }
  if (o.pair.size() == 2) {
    std::snprintf(buf, sizeof(buf), ",\"pair\":[%d,%d]", o.pair[0], o.pair[1]);
    j += buf;
  }
  j += "}";
  return j;
}

bool atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    out.flush();
    if (!out) return false;
  }
  std::error_code ec;
  fs::rename(tmp, fs::path(path), ec);
  return !ec;
}

int exit_code_for(int rc) { return rc == FSF_ERR_DOMAIN ? 2 : 1; }

int report_failure(const CliOptions& o) {
  const char* ej = fsf_last_error_json();
  if (ej && *ej) {
    std::fputs(ej, stdout);
    atomic_write_file(o.outdir + "/error.json", ej);
  }
  std::fprintf(stderr, "fsforge: %s\n", fsf_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsforge: gradient flowlines, symplectic transport, strip PDE solves and "
               "directed-category reports for one-variable complex polynomials"};
  app.set_version_flag("--version", std::string(fsf_version()));
  app.require_subcommand(1);

  CliOptions o;
  const char* descs[][2] = {
      {"crit", "critical points, values and second derivatives"},
      {"order", "clockwise ordering, convexity and exceptional angles"},
      {"flows", "connection counts and flowlines for all directed pairs (+SVG)"},
      {"grade", "absolute gradings and actions of flowline generators"},
      {"floer", "strip PDE solve with energy/holomorphy diagnostics (+SVG)"},
      {"category", "directed category assembly and A-infinity verification"},
      {"wallcross", "deform a 3-critical-point family and verify the count update"},
  };
  for (const auto& d : descs) {
    CLI::App* c = app.add_subcommand(d[0], d[1]);
    c->add_option("file", o.file, "problem or family JSON file")->required();
    c->add_option("-o,--out", o.outdir, "output directory (default .)");
    c->add_option("--alpha", o.alpha, "base angle override (radians)")
        ->each([&](const std::string&) { o.have_alpha = true; });
    c->add_option("--tol-root", o.tol_root, "root-finding residual tolerance")
        ->each([&](const std::string&) { o.have_tol_root = true; });
    c->add_option("--tol-conserve", o.tol_conserve, "conserved-quantity drift tolerance")
        ->each([&](const std::string&) { o.have_tol_conserve = true; });
    c->add_option("--grid", o.grid, "strip grid NSxNT (e.g. 128x128)");
    c->add_option("--seed", o.seed, "seed for multi-start solves");
    c->add_option("--jobs", o.jobs, "parallelism degree for pair maps");
    c->add_option("--pair", o.pair, "source,target pair for the strip solve")->expected(2);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help/version/usage message
    return rc == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  if ((o.have_tol_root && o.tol_root <= 0) || (o.have_tol_conserve && o.tol_conserve <= 0)) {
    std::fprintf(stderr, "fsforge: tolerances must be positive\n");
    return 1;
  }
  if (o.jobs < 1) {
    std::fprintf(stderr, "fsforge: --jobs must be at least 1\n");
    return 1;
  }

  bool bad_grid = false;
  const std::string opts = compose_options(o, bad_grid);
  if (bad_grid) {
    std::fprintf(stderr, "fsforge: --grid must look like 128x128\n");
    return 1;
  }

  std::error_code ec;
  std::filesystem::create_directories(o.outdir, ec);
  if (ec) {
    std::fprintf(stderr, "fsforge: cannot create output directory %s: %s\n", o.outdir.c_str(),
                 ec.message().c_str());
    return 1;
  }

  char* json = nullptr;
  int rc = FSF_OK;
  if (cmd == "wallcross") {
    fsf_family* fam = nullptr;
    rc = fsf_family_from_file(o.file.c_str(), &fam);
    if (rc == FSF_OK) rc = fsf_run_wallcross(fam, opts.c_str(), &json);
    fsf_family_free(fam);
  } else {
    fsf_problem* prob = nullptr;
    rc = fsf_problem_from_file(o.file.c_str(), &prob);
    if (rc == FSF_OK) {
      if (cmd == "crit") rc = fsf_run_crit(prob, opts.c_str(), &json);
      else if (cmd == "order") rc = fsf_run_order(prob, opts.c_str(), &json);
      else if (cmd == "flows") rc = fsf_run_flows(prob, opts.c_str(), &json);
      else if (cmd == "grade") rc = fsf_run_grade(prob, opts.c_str(), &json);
      else if (cmd == "floer") rc = fsf_run_floer(prob, opts.c_str(), &json);
      else if (cmd == "category") rc = fsf_run_category(prob, opts.c_str(), &json);
    }
    fsf_problem_free(prob);
  }

  if (rc != FSF_OK) {
    report_failure(o);
    return exit_code_for(rc);
  }

  const std::string report_path = o.outdir + "/" + cmd + ".json";
  if (!atomic_write_file(report_path, json)) {
    std::fprintf(stderr, "fsforge: cannot write %s\n", report_path.c_str());
    fsf_free_string(json);
    return 1;
  }

  if (cmd == "flows" || cmd == "floer") {
    char* svg = nullptr;
    rc = fsf_render_svg(json, cmd.c_str(), &svg);
    if (rc != FSF_OK) {
      report_failure(o);
      fsf_free_string(json);
      return exit_code_for(rc);
    }
    const std::string svg_path = o.outdir + "/" + cmd + ".svg";
    const bool ok = atomic_write_file(svg_path, svg);
    fsf_free_string(svg);
    if (!ok) {
      std::fprintf(stderr, "fsforge: cannot write %s\n", svg_path.c_str());
      fsf_free_string(json);
      return 1;
    }
  }

  std::fputs(json, stdout);
  fsf_free_string(json);
  return 0;
}
