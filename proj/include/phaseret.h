/* C interface to the measurement-design library. All entry points are
 * exception-safe: failures come back as status codes and the message is kept
 * per thread for pr_last_error. Objects returned through out-parameters are
 * owned by the caller and released with the matching *_free. */

#ifndef PHASERET_H
#define PHASERET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pr_status {
  PR_OK = 0,
  PR_ERR_VALIDATION = 2, /* bad arguments, malformed config or file */
  PR_ERR_NUMERICAL = 3,  /* collapse, singularity, non-finite values */
  PR_ERR_IO = 4,
  PR_ERR_UNKNOWN = 5
} pr_status;

typedef struct pr_matrix pr_matrix;
typedef struct pr_table pr_table;

/* Message for the most recent failing call on this thread; empty string if
 * nothing failed yet. The pointer stays valid until the next failing call. */
const char* pr_last_error(void);

/* config_json: NULL or "" for defaults, otherwise the experiment-config
 * document described in the README. Unknown keys are rejected. */

/* Build the matrix for a label at one operating point. Designed labels (OK,
 * UC, UC_I, MF, MF_I) depend only on the config; the per-trial labels RG and
 * CD are drawn once from a stream keyed by (master_seed, label, m). */
pr_status pr_design(const char* config_json, const char* label, double snr_db,
                    pr_matrix** out);

int64_t pr_matrix_rows(const pr_matrix* matrix);
int64_t pr_matrix_cols(const pr_matrix* matrix);
double pr_matrix_budget(const pr_matrix* matrix);
const char* pr_matrix_label(const pr_matrix* matrix);
pr_status pr_matrix_entry(const pr_matrix* matrix, int64_t row, int64_t col, double* re,
                          double* im);

pr_status pr_matrix_to_json(const pr_matrix* matrix, char** out_json);
pr_status pr_matrix_from_json(const char* json, pr_matrix** out);
pr_status pr_matrix_save(const pr_matrix* matrix, const char* path);
pr_status pr_matrix_load(const char* path, pr_matrix** out);
void pr_matrix_free(pr_matrix* matrix);

/* Monte-Carlo recovery sweeps; deterministic for a fixed config. */
pr_status pr_run_snr_sweep(const char* config_json, pr_table** out);
pr_status pr_run_complexity_sweep(const char* config_json, pr_table** out);
pr_status pr_run_frobenius_table(const char* config_json, pr_table** out);

/* format: "csv" or "json". */
pr_status pr_table_to_string(const pr_table* table, const char* format, char** out);
pr_status pr_table_write(const pr_table* table, const char* path, const char* format);
void pr_table_free(pr_table* table);

/* Fast internal self-checks; *out_failures receives the failing-line count. */
pr_status pr_verify(char** out_report, int* out_failures);

void pr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PHASERET_H */
