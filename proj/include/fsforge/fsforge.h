#ifndef FSFORGE_H
#define FSFORGE_H

/* C interface to the fsforge numerical core.
 *
 * Every entry point returns FSF_OK (0) on success or a nonzero code; the
 * failure details are kept in thread-local state readable through
 * fsf_last_error / fsf_last_error_name / fsf_last_error_json.  Strings
 * returned through out-parameters are heap-allocated and must be released
 * with fsf_free_string. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define FSF_OK 0
#define FSF_ERR_IO 1       /* file unreadable / unwritable */
#define FSF_ERR_PARSE 2    /* malformed JSON or schema violation */
#define FSF_ERR_INVALID 3  /* invalid argument value */
#define FSF_ERR_DOMAIN 4   /* mathematical precondition failed (NonMorse, ...) */
#define FSF_ERR_INTERNAL 5 /* unexpected failure */

typedef struct fsf_problem fsf_problem;
typedef struct fsf_family fsf_family;

/* Constant version string, also embedded in every report. */
const char* fsf_version(void);

/* Thread-local description of the most recent failure (empty when the
 * last call succeeded).  The pointers stay valid until the next fsforge
 * call on the same thread. */
const char* fsf_last_error(void);      /* human-readable message */
const char* fsf_last_error_name(void); /* error name, e.g. "NonMorse" */
const char* fsf_last_error_json(void); /* machine-readable error report */

/* Problem files: { "coefficients": [[re,im],...] constant-first,
 * "alpha": radians (optional, default pi/2),
 * "translate": [re,im] (optional substitution z -> z + a) }. */
int fsf_problem_from_json(const char* json_text, fsf_problem** out);
int fsf_problem_from_file(const char* path, fsf_problem** out);
void fsf_problem_free(fsf_problem* p);

/* Family files: { "coefficients": [...], "velocity": [...],
 * "t_before": t0, "t_after": t1, "frame": [i, k] (optional) }. */
int fsf_family_from_json(const char* json_text, fsf_family** out);
int fsf_family_from_file(const char* path, fsf_family** out);
void fsf_family_free(fsf_family* f);

/* Pipelines.  options_json may be NULL or a JSON object with any of:
 * alpha, tol_root, tol_conserve, grid [ns,nt], S, T, seed, jobs,
 * pair [i,j], m1 {"i,j": [[0|1],...]}.  On success *json_out receives the
 * serialized report (2-space indent, trailing newline, deterministic). */
int fsf_run_crit(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_order(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_flows(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_grade(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_floer(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_category(const fsf_problem* p, const char* options_json, char** json_out);
int fsf_run_wallcross(const fsf_family* f, const char* options_json, char** json_out);

/* Derived SVG view of a report produced by this library.
 * kind: "flows" | "floer". */
int fsf_render_svg(const char* report_json, const char* kind, char** svg_out);

void fsf_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FSFORGE_H */
