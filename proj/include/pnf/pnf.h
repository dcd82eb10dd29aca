#ifndef PNF_H
#define PNF_H

/* C interface to the local newform, matrix coefficient and global bound library.
 * Every function returns a pnf_status; on failure pnf_last_error() describes the cause
 * (per thread). Strings returned through char** are owned by the caller and released
 * with pnf_string_free. JSON strings are UTF-8. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PNF_API __declspec(dllexport)
#else
#define PNF_API __attribute__((visibility("default")))
#endif

typedef enum pnf_status {
    PNF_OK = 0,
    PNF_ERR_INVALID_ARGUMENT = 1,
    PNF_ERR_NOT_INVERTIBLE = 2,
    PNF_ERR_UNSUPPORTED = 3,
    PNF_ERR_OVERFLOW = 4,
    PNF_ERR_VERIFICATION_FAILED = 5,
    PNF_ERR_IO = 6,
    PNF_ERR_INTERNAL = 7
} pnf_status;

typedef struct pnf_catalog pnf_catalog;
typedef struct pnf_newform pnf_newform;
typedef struct pnf_cache pnf_cache;

PNF_API const char* pnf_version(void);
PNF_API const char* pnf_status_name(pnf_status status);
/* Message for the most recent failure on this thread; empty after success. */
PNF_API const char* pnf_last_error(void);
PNF_API void pnf_string_free(char* s);

/* ------------------------------------------------------------ catalog and newforms */

PNF_API pnf_status pnf_catalog_create(long p, int n_max, pnf_catalog** out);
PNF_API void pnf_catalog_destroy(pnf_catalog* catalog);
PNF_API pnf_status pnf_catalog_size(const pnf_catalog* catalog, size_t* out);
/* Array of {index, id, kind, p, n, n0, n1, m, m1, params} plus per-variant coverage. */
PNF_API pnf_status pnf_catalog_json(const pnf_catalog* catalog, char** out_json);
PNF_API pnf_status pnf_catalog_find(const pnf_catalog* catalog, const char* id, size_t* out_index);

PNF_API pnf_status pnf_newform_create(const pnf_catalog* catalog, size_t index, pnf_newform** out);
PNF_API void pnf_newform_destroy(pnf_newform* newform);
/* W(g) for g = [[a, b], [c, d]]; entries are rationals written "num" or "num/den".
 * out_exact receives the cyclotomic value as text; re/im may be NULL. */
PNF_API pnf_status pnf_newform_eval(const pnf_newform* newform, const char* a, const char* b, const char* c,
                                    const char* d, char** out_exact, double* out_re, double* out_im);
/* W(a(p^t) w n(p^{-l} v)). */
PNF_API pnf_status pnf_newform_coset_value(const pnf_newform* newform, int t, int l, const char* v, char** out_exact,
                                           double* out_re, double* out_im);
/* Nonzero values over the coset window with t in [t_min, t_max], as a JSON array. */
PNF_API pnf_status pnf_newform_scan(const pnf_newform* newform, int t_min, int t_max, char** out_json);

/* ------------------------------------------------------------ checks */

/* JSON array of check names. */
PNF_API pnf_status pnf_check_names(char** out_json);
/* jobs_json: array of {"check": name, "params": {...}}. Runs on `workers` threads; the
 * output array keeps job order. *out_all_pass is 1 iff every check passed. */
PNF_API pnf_status pnf_run_checks(const char* jobs_json, int workers, char** out_json, int* out_all_pass);

/* ------------------------------------------------------------ archimedean */

PNF_API pnf_status pnf_bessel_k(double t, double y, double* out);
/* K_{it}(y), t e^{pi t} K^2 / envelope(y), and the envelope. */
PNF_API pnf_status pnf_bessel_envelope(double t, double y, double* out_k, double* out_ratio, double* out_envelope);

/* ------------------------------------------------------------ counting */

/* Matrices with a > 0, N2 | c, det = ell and u(z, gamma z) <= delta for z = x + i y,
 * with the comparison bound, as JSON. */
PNF_API pnf_status pnf_count(double x, double y, long ell, double delta, long N2, char** out_json);

/* ------------------------------------------------------------ global bound */

PNF_API pnf_status pnf_level_invariants(long N, long M, char** out_json);
PNF_API pnf_status pnf_fourier_bound(double Q, double N0g, double T, double y, char** out_json);
PNF_API pnf_status pnf_intro_table(char** out_json);

/* ------------------------------------------------------------ table cache */

PNF_API pnf_status pnf_cache_open(const char* dir, pnf_cache** out);
PNF_API void pnf_cache_close(pnf_cache* cache);
/* Gauss sums and epsilon factors of characters of exact conductor p^a; cache may be NULL. */
PNF_API pnf_status pnf_character_table(pnf_cache* cache, long p, int a, char** out_json);
/* epsilon(1/2, pi) for the catalog at p up to n_max; cache may be NULL. */
PNF_API pnf_status pnf_epsilon_table(pnf_cache* cache, long p, int n_max, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* PNF_H */
