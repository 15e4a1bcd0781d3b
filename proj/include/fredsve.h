#ifndef FREDSVE_H
#define FREDSVE_H

/* C interface to the continuous first-kind integral equation solver.
 *
 * Every function returns a status code; FREDSVE_OK means the out parameters
 * were filled. On failure the out parameters are untouched and a
 * human-readable message is available from fredsve_last_error() until the
 * next failing call on the same thread. All returned strings are heap
 * allocations owned by the caller; release them with fredsve_string_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fredsve_status {
  FREDSVE_OK = 0,
  FREDSVE_ERR_INVALID_ARGUMENT = 1,
  FREDSVE_ERR_UNKNOWN_PROBLEM = 2,
  FREDSVE_ERR_CONFIG = 3,
  FREDSVE_ERR_NUMERIC = 4,
  FREDSVE_ERR_INTERNAL = 5
} fredsve_status;

/* Semantic version of the library, static storage. */
const char* fredsve_version(void);

/* Message for the most recent failure on the calling thread; the empty
 * string when nothing has failed. Static storage, valid until the next
 * failing call on this thread. */
const char* fredsve_last_error(void);

/* Releases a string returned through an out parameter. NULL is a no-op. */
void fredsve_string_free(char* s);

/* JSON array of the built-in problem names. */
fredsve_status fredsve_problem_list(char** out_json);

/* A session holds one problem's separated-kernel factorization and singular
 * value expansion (per axis for the two-dimensional problem). Sessions are
 * immutable after creation; concurrent reads from several threads are safe,
 * creation and destruction are not synchronized with use. Pass 0 to take
 * the default aca_tol (1e-13) or cutoff_eps (1e-10). */
typedef struct fredsve_session fredsve_session;

fredsve_status fredsve_session_open(const char* problem, double aca_tol,
                                    double cutoff_eps, fredsve_session** out);
void fredsve_session_close(fredsve_session* s);

/* {"problem", "is_2d", "rank", "sigmas": [...]} plus "rank2"/"sigmas2" for
 * the two-dimensional problem. */
fredsve_status fredsve_session_info(const fredsve_session* s, char** out_json);

/* Solves one noisy instance. options_json:
 *   {"method": "tsve"|"tikhonov", "alpha": a, "seed": n, "eta": e}
 * with alpha > 0 required, seed defaulting to 1 and eta to 1.0. The result
 * carries the chosen parameter, relative error, residual, noise norm, the
 * truncation error-bound pair (null when not applicable), and timing:
 *   {"problem", "method", "alpha", "seed", "param", "re", "residual",
 *    "delta", "bound_lhs", "bound_rhs", "wall_time_ms"}
 */
fredsve_status fredsve_solve(const fredsve_session* s, const char* options_json,
                             char** out_json);

/* CSV (index, sigma, sigma_discrete, rel_gap) comparing the session's
 * singular values with those of a discrete quadrature-collocation operator
 * on n nodes per axis. One-dimensional problems only. */
fredsve_status fredsve_oracle_csv(const fredsve_session* s, int n, char** out_csv);

/* Benchmark grid over (problem, method, alpha, seed). config_json may set
 * any of: "problems", "alphas", "methods", "seeds", "eta", "cutoff_eps",
 * "aca_tol", "output_dir"; omitted fields keep their defaults, unknown
 * fields are rejected. NULL or "" means all defaults. Returns the per-cell
 * CSV and the per-(problem, method, alpha) median summary JSON; either out
 * pointer may be NULL if that artifact is not wanted. Cell failures are
 * recorded in the rows, never turned into a status. */
fredsve_status fredsve_bench_run(const char* config_json, char** out_csv,
                                 char** out_summary_json);

/* Median truncation error-bound pair per problem at alpha = 1e-2, as CSV
 * (problem, lhs, rhs). */
fredsve_status fredsve_bound_run(const char* config_json, char** out_csv);

/* Two-axis blur benchmark at the first configured alpha and seed; samples
 * the exact solution, noisy data, and both reconstructions on
 * grid_points x grid_points tensor grids (written to output_dir when set).
 * Returns the two method result rows as JSON {"tsve": {...},
 * "tikhonov": {...}}. */
fredsve_status fredsve_blur2d_run(const char* config_json, int grid_points,
                                  char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* FREDSVE_H */
