#ifndef SPECTRAL_HT_H
#define SPECTRAL_HT_H

/* C interface to the spectral compressed-sensing solver. All functions are
 * thread-safe; error state is per thread. Complex buffers are interleaved
 * doubles (re0, im0, re1, im1, ...). Sample indices are 1-based, matching the
 * signal model y[i], i = 1..n. */

#ifdef __cplusplus
extern "C" {
#endif

/* Error categories reported by stht_last_error_code(). */
enum {
  STHT_ERR_NONE = 0,
  STHT_ERR_DIMENSION_MISMATCH = 1,
  STHT_ERR_BAD_INDEX = 2,
  STHT_ERR_DUPLICATE_FREQUENCY = 3,
  STHT_ERR_ZERO_COEFFICIENT = 4,
  STHT_ERR_SEPARATION_INFEASIBLE = 5,
  STHT_ERR_ZERO_REFERENCE = 6,
  STHT_ERR_SPARSITY_TOO_LARGE = 7,
  STHT_ERR_RANK_DEFICIENT = 8,
  STHT_ERR_NOT_ORTHOGONAL = 9,
  STHT_ERR_NOT_SYMMETRIC = 10,
  STHT_ERR_BASE_MISMATCH = 11,
  STHT_ERR_INVALID_CONFIG = 12,
  STHT_ERR_PARSE = 13,
  STHT_ERR_IO = 14,
  STHT_ERR_UNKNOWN = 255
};

/* Terminal solver statuses; values double as CLI exit codes. */
enum {
  STHT_STATUS_GRAD_TOLERANCE_MET = 0,
  STHT_STATUS_MAX_ITERATIONS = 2,
  STHT_STATUS_LINE_SEARCH_STALLED = 3,
  STHT_STATUS_STOPPED_BY_OBSERVER = 4
};

typedef struct stht_solver_config {
  int max_iter;            /* iteration cap (default 3000) */
  double grad_tol;         /* stop when g(grad, grad) falls below (1e-6) */
  double safeguard_c;      /* conjugate-direction descent safeguard (1e-8) */
  int rescale_safeguard;   /* nonzero scales the safeguard by g(grad, grad) */
  double armijo_c;         /* sufficient-decrease constant in (0, 1) (1e-5) */
  double lambda;           /* spectral barrier weight (1e-8) */
  double mu_override;      /* structure-penalty weight; <= 0 selects m/n */
  int max_backtracks;      /* step halvings before declaring a stall (60) */
  unsigned long long seed; /* initialization perturbation seed */
} stht_solver_config;

/* Fill cfg with the default configuration. */
void stht_solver_config_init(stht_solver_config* cfg);

/* Outcome of one solve: recovered signal, iteration trace, terminal status. */
typedef struct stht_result stht_result;

/* Recover a length-n signal from m samples taken at the 1-based positions
 * omega[0..m-1], with target rank k. observed holds 2m doubles; truth is
 * either NULL or 2n doubles and enables the per-iteration NMSE trace column.
 * cfg NULL selects defaults. Returns NULL on failure (see stht_last_error). */
stht_result* stht_solve(int n, const int* omega, int m, const double* observed, int k,
                        const stht_solver_config* cfg, const double* truth);

/* STHT_STATUS_* value of the terminal state. */
int stht_result_status(const stht_result* result);

/* Completed iterations (trace rows). */
int stht_result_iterations(const stht_result* result);

/* Signal length n of the recovered signal. */
int stht_result_signal_len(const stht_result* result);

/* Copy the recovered signal into out (2n doubles, interleaved). */
void stht_result_signal(const stht_result* result, double* out);

/* NMSE against the supplied truth: value at the last iteration and the best
 * value along the trace. NaN when truth was not supplied. */
double stht_result_final_nmse(const stht_result* result);
double stht_result_best_nmse(const stht_result* result);

/* The iteration trace rendered as CSV. Free with stht_string_free. */
char* stht_result_trace_csv(const stht_result* result);

void stht_result_free(stht_result* result);

/* Run an experiment described by a JSON config (see the README for the
 * schema). kind is "convergence", "phase", "timing", "solve" or NULL/"" when
 * the config names the experiment itself. out_override replaces the config's
 * output path when non-NULL/nonempty. threads <= 0 selects the hardware
 * concurrency. Returns a process-style exit code (0 success, 1 config/parse
 * error, solver status codes for "solve"); *message_out, when non-NULL,
 * receives a one-line summary to free with stht_string_free. */
int stht_run_experiment(const char* kind, const char* config_json,
                        const char* out_override, int force, int threads,
                        char** message_out);

/* The documented trial-seed chain used by the experiment harness:
 * s = mix(master ^ 0x9e3779b97f4a7c15), then s = mix(s ^ v) for v in
 * {m, k, trial}, where mix is the splitmix64 finalizer. */
unsigned long long stht_trial_seed(unsigned long long master, int m, int k, int trial);

/* Message and category of the calling thread's most recent failure; the
 * message is owned by the library and valid until the next failing call. */
const char* stht_last_error(void);
int stht_last_error_code(void);

void stht_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SPECTRAL_HT_H */
