/* balcirc: iterative load balancing in the balancing-circuit model.
 *
 * C interface to the shared library. All functions returning int use the
 * bc_status codes below; on failure bc_last_error() carries a message for
 * the calling thread. Strings returned through char** are heap-allocated
 * by the library and must be released with bc_string_free().
 */
#ifndef BALCIRC_H
#define BALCIRC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BC_API __declspec(dllexport)
#else
#define BC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bc_status {
    BC_OK = 0,
    BC_ERR_INVALID = 1,    /* bad arguments, null pointers */
    BC_ERR_VALIDATION = 2, /* spec/domain violations  */
    BC_ERR_IO = 3,         /* file-system failures */
    BC_ERR_NUMERIC = 4     /* iteration did not converge */
} bc_status;

BC_API const char* bc_last_error(void);
BC_API void bc_string_free(char* s);

/* ---- matching schedules (opaque) ---- */

typedef struct bc_schedule bc_schedule;

/* kind: cycle | torus | hypercube | expander. r is the torus dimension,
 * d the expander matching count, seed the expander seed. */
BC_API int bc_schedule_build(const char* kind, int64_t n, int32_t r, int32_t d, uint64_t seed,
                             bc_schedule** out);
BC_API int bc_schedule_from_json(const char* json_text, bc_schedule** out);
BC_API int bc_schedule_load(const char* path, bc_schedule** out);
BC_API int bc_schedule_save(const bc_schedule* s, const char* path);
BC_API int bc_schedule_to_json(const bc_schedule* s, char** out_json);
BC_API void bc_schedule_free(bc_schedule* s);

BC_API int64_t bc_schedule_n(const bc_schedule* s);
BC_API int32_t bc_schedule_period(const bc_schedule* s);

/* Violations as a JSON array of strings; empty array means valid. */
BC_API int bc_schedule_validate(const bc_schedule* s, char** out_violations_json);

/* Graph distance on the schedule's topology. */
BC_API int bc_node_distance(const bc_schedule* s, int64_t u, int64_t v, int64_t* out);

/* ---- round-matrix computations ---- */

/* out must hold n doubles: the column M^t e_u. */
BC_API int bc_tstep_column(const bc_schedule* s, int64_t u, int64_t t, double* out);
BC_API int bc_l2_to_uniform(const double* column, int64_t n, double* out);
BC_API int bc_pair_column_distance(const bc_schedule* s, int64_t u, int64_t v, int64_t t,
                                   double* out);
BC_API int bc_second_eigenvalue(const bc_schedule* s, double* out);

/* ---- input distributions ---- */

/* spec syntax: uniform:K | binomial:m:p | geometric:p | poisson:mu */
BC_API int bc_dist_moments(const char* spec, double* mu, double* sigma);
/* out must hold n entries. */
BC_API int bc_dist_sample(const char* spec, int64_t n, uint64_t seed, int64_t* out);

/* ---- balancing runs ---- */

BC_API int bc_run_continuous(const bc_schedule* s, const double* xi0, int64_t t, double* out);
BC_API int bc_run_discrete(const bc_schedule* s, const int64_t* x0, int64_t t, uint64_t seed,
                           int64_t* out);
BC_API int bc_worst_case_input(const bc_schedule* s, int64_t k, int64_t* out);
BC_API int bc_discrepancy(const int64_t* x, int64_t n, int64_t* out);
/* max_w |x_w^(t) - xi_w^(t)| for both processes started from x0. */
BC_API int bc_deviation(const bc_schedule* s, const int64_t* x0, int64_t t, uint64_t seed,
                        double* out);

/* Checkpointed single run; out_rows must hold 5*num_checkpoints doubles,
 * written as (t, discrepancy, max, min, total) per checkpoint.
 * input: dist:<spec> | worstcase:K | file:path; mode: discrete | continuous. */
BC_API int bc_simulate(const bc_schedule* s, const char* input, const char* mode, uint64_t seed,
                       const int64_t* checkpoints, int32_t num_checkpoints, double* out_rows);

/* ---- bound evaluators ---- */

/* params: comma-separated k=v list, e.g. "alpha=0.25,beta=0.25,t=64".
 * Returns the BoundReport as one JSON object. */
BC_API int bc_bound_eval(const char* name, const char* params, char** out_report_json);

/* ---- evolving sets ---- */

/* chain: from-schedule:file.json | lazy-cycle:n. Returns JSON lines:
 * chain parameters, per-state t-step estimates, absorption statistics and
 * the absorption tail-bound checks. */
BC_API int bc_evolset_report(const char* chain, int64_t x, int64_t t, int64_t trials,
                             uint64_t seed, char** out_json_lines);

/* ---- experiment harness ---- */

/* Runs the experiment described by the config JSON and writes raw.csv,
 * raw.summary.csv, result.json (and bounds.json when overlays are present)
 * into out_dir. When out_summary_json is non-null it receives the summary
 * rows as JSON. */
BC_API int bc_experiment_run(const char* config_json, const char* out_dir,
                             char** out_summary_json);

/* Derived seed for repetition r of a base seed (splitmix64 stream). */
BC_API uint64_t bc_mix_seed(uint64_t base, uint64_t index);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BALCIRC_H */
