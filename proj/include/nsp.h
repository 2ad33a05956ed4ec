/* Public C API of the resonant NLS wave-packet toolkit.
 *
 * All heavy objects live behind opaque handles; report-producing calls hand
 * back malloc'd JSON (or CSV) strings that the caller releases through
 * nsp_string_free. Every function returns an nsp_status; on failure
 * nsp_last_error() carries the message for the calling thread.
 */
#ifndef NSP_H
#define NSP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsp_status {
    NSP_OK = 0,
    NSP_ERR_INVALID = 2,       /* bad arguments or malformed input */
    NSP_ERR_EXCLUDED_EPS = 3,  /* eps rejected by a Diophantine screen */
    NSP_ERR_CRITERION = 4,     /* a verification criterion failed */
    NSP_ERR_INTERNAL = 5
} nsp_status;

typedef struct nsp_modeset nsp_modeset;

const char* nsp_version_string(void);
const char* nsp_last_error(void);
void nsp_string_free(char* s);

/* --- mode sets ---------------------------------------------------------- */

nsp_status nsp_modeset_lemma5(long n_count, nsp_modeset** out);
nsp_status nsp_modeset_lemma6(long n_count, const long* gaps, long gap_count,
                              nsp_modeset** out);
/* Accepts [7,8] or {"m_plus":[7,8]}. */
nsp_status nsp_modeset_parse(const char* json, nsp_modeset** out);
void nsp_modeset_free(nsp_modeset* ms);

long nsp_modeset_size(const nsp_modeset* ms);
nsp_status nsp_modeset_entries(const nsp_modeset* ms, long* out, long capacity);

/* Validity report for an arbitrary candidate list (need not be valid). */
nsp_status nsp_validate_modeset(const long* modes, long count, char** json_out);
nsp_status nsp_modeset_report(const nsp_modeset* ms, char** json_out);

/* --- computations -------------------------------------------------------- */

nsp_status nsp_amplitudes_report(const nsp_modeset* ms, char** json_out);

nsp_status nsp_series_report(const nsp_modeset* ms, double eps, int order,
                             int dump_coefficients, char** json_out);

nsp_status nsp_solve(const nsp_modeset* ms, double eps, long n_max, long m_max,
                     double tol, int max_iter, char** json_out);

nsp_status nsp_sweep(const nsp_modeset* ms, const double* eps_list, long eps_count,
                     long n_max, long m_max, char** json_out, char** csv_out);

nsp_status nsp_scan(double eps0, int grid, long n_max, int include_second,
                    char** json_out, char** csv_out);

/* Runs a verification suite; *text_out gets one pass/fail line per criterion.
 * Returns NSP_ERR_CRITERION when any criterion fails. */
nsp_status nsp_verify(const char* suite, char** text_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NSP_H */
