#include "fsforge/fsforge.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/error.hpp"
#include "core/json_io.hpp"
#include "core/svg.hpp"
#include "core/version.hpp"

struct fsf_problem {
  fsforge::ProblemSpec spec;
};
struct fsf_family {
  fsforge::FamilySpec spec;
};

namespace {

thread_local std::string g_error_msg;
thread_local std::string g_error_name;
thread_local std::string g_error_json;

void clear_error() {
  g_error_msg.clear();
  g_error_name.clear();
  g_error_json.clear();
}

int map_code(fsforge::ErrorCode c) {
  using EC = fsforge::ErrorCode;
  switch (c) {
    case EC::io_error:
      return FSF_ERR_IO;
    case EC::parse_error:
      return FSF_ERR_PARSE;
    case EC::invalid_argument:
      return FSF_ERR_INVALID;
    default:
      return FSF_ERR_DOMAIN;
  }
}

template <class Fn>
int guarded(Fn&& fn) {
  clear_error();
  try {
    fn();
    return FSF_OK;
  } catch (const fsforge::Error& e) {
    g_error_msg = e.what();
    g_error_name = fsforge::error_name(e.code());
    g_error_json = fsforge::dump_report(fsforge::error_json(e));
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_error_msg = e.what();
    g_error_name = "Internal";
    fsforge::Json j;
    j["version"] = fsforge::kVersion;
    j["error"] = {{"code", "Internal"}, {"message", e.what()}};
    g_error_json = fsforge::dump_report(j);
    return FSF_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fsforge::Json parse_json_or_fail(const char* text) {
  if (!text) return fsforge::Json(nullptr);
  try {
    return fsforge::Json::parse(std::string(text));
  } catch (const nlohmann::json::exception& e) {
    fsforge::fail(fsforge::ErrorCode::parse_error, e.what());
  }
}

int require(bool ok, const char* what) {
  if (ok) return FSF_OK;
  clear_error();
  g_error_msg = what;
  g_error_name = "InvalidArgument";
  return FSF_ERR_INVALID;
}

using Runner = fsforge::Json (*)(const fsforge::ProblemSpec&, const fsforge::RunOptions&);

int run_problem_pipeline(const fsf_problem* p, const char* options_json, char** json_out,
                         Runner runner) {
  if (int rc = require(p && json_out, "null argument")) return rc;
  return guarded([&] {
    const auto opt = fsforge::options_from_json(parse_json_or_fail(options_json));
    *json_out = dup_string(fsforge::dump_report(runner(p->spec, opt)));
  });
}

}  // namespace

extern "C" {

const char* fsf_version(void) { return fsforge::kVersion; }

const char* fsf_last_error(void) { return g_error_msg.c_str(); }
const char* fsf_last_error_name(void) { return g_error_name.c_str(); }
const char* fsf_last_error_json(void) { return g_error_json.c_str(); }

int fsf_problem_from_json(const char* json_text, fsf_problem** out) {
  if (int rc = require(json_text && out, "null argument")) return rc;
  return guarded(
      [&] { *out = new fsf_problem{fsforge::problem_from_json(parse_json_or_fail(json_text))}; });
}

int fsf_problem_from_file(const char* path, fsf_problem** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] { *out = new fsf_problem{fsforge::load_problem(path)}; });
}

void fsf_problem_free(fsf_problem* p) { delete p; }

int fsf_family_from_json(const char* json_text, fsf_family** out) {
  if (int rc = require(json_text && out, "null argument")) return rc;
  return guarded(
      [&] { *out = new fsf_family{fsforge::family_from_json(parse_json_or_fail(json_text))}; });
}

int fsf_family_from_file(const char* path, fsf_family** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] { *out = new fsf_family{fsforge::load_family(path)}; });
}

void fsf_family_free(fsf_family* f) { delete f; }

int fsf_run_crit(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_crit);
}
int fsf_run_order(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_order);
}
int fsf_run_flows(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_flows);
}
int fsf_run_grade(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_grade);
}
int fsf_run_floer(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_floer);
}
int fsf_run_category(const fsf_problem* p, const char* options_json, char** json_out) {
  return run_problem_pipeline(p, options_json, json_out, &fsforge::run_category);
}

int fsf_run_wallcross(const fsf_family* f, const char* options_json, char** json_out) {
  if (int rc = require(f && json_out, "null argument")) return rc;
  return guarded([&] {
    const auto opt = fsforge::options_from_json(parse_json_or_fail(options_json));
    *json_out = dup_string(fsforge::dump_report(fsforge::run_wallcross(f->spec, opt)));
  });
}

int fsf_render_svg(const char* report_json, const char* kind, char** svg_out) {
  if (int rc = require(report_json && kind && svg_out, "null argument")) return rc;
  return guarded(
      [&] { *svg_out = dup_string(fsforge::render_svg(parse_json_or_fail(report_json), kind)); });
}

void fsf_free_string(char* s) { std::free(s); }

}  // extern "C"
