/* C interface to the skewspec library. All strings returned through `char**`
 * are heap allocated and must be released with ss_string_free. */
#ifndef SKEWSPEC_H
#define SKEWSPEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(SKEWSPEC_BUILDING_LIBRARY)
#define SS_API __attribute__((visibility("default")))
#else
#define SS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ss_experiment ss_experiment;

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_DIMENSION = 1,
  SS_ERR_TAG = 2,
  SS_ERR_INVALID_ELEMENT = 3,
  SS_ERR_INVALID_ARGUMENT = 4,
  SS_ERR_COMMUTATION = 5,
  SS_ERR_DEGENERATE_WEIGHTS = 6,
  SS_ERR_CONFIG = 7,
  SS_ERR_NOT_FOUND = 8,
  SS_ERR_IO = 9,
  SS_ERR_INTERNAL = 10
} ss_status;

typedef enum ss_group { SS_GROUP_TORUS = 0, SS_GROUP_SU2 = 1, SS_GROUP_U2 = 2 } ss_group;

SS_API const char* ss_version(void);
/* Message of the last failed call on this thread ("" if none). */
SS_API const char* ss_last_error(void);
SS_API const char* ss_status_name(ss_status status);
SS_API void ss_string_free(char* s);

SS_API ss_status ss_experiment_load(const char* path, ss_experiment** out);
SS_API ss_status ss_experiment_parse(const char* json_text, ss_experiment** out);
SS_API void ss_experiment_free(ss_experiment* exp);
SS_API ss_status ss_experiment_serialize(const ss_experiment* exp, char** out);
SS_API ss_status ss_experiment_hash(const ss_experiment* exp, char** out);

/* Overrides of the analysis section. */
SS_API ss_status ss_experiment_set_grid(ss_experiment* exp, size_t per_dim);
SS_API ss_status ss_experiment_set_seed(ss_experiment* exp, uint64_t seed);
SS_API ss_status ss_experiment_set_nmax(ss_experiment* exp, size_t n_max);
/* Per-dimension size of the correlation quadrature grid. */
SS_API ss_status ss_experiment_set_quadrature(ss_experiment* exp, size_t per_dim);

SS_API size_t ss_experiment_block_count(const ss_experiment* exp);
SS_API ss_status ss_experiment_block_label(const ss_experiment* exp, size_t index, char** out);

/* Writes report.json and summary.json into out_dir when it is non-NULL.
 * report_json may be NULL. */
SS_API ss_status ss_analyze(const ss_experiment* exp, const char* out_dir, char** summary_json, char** report_json);
SS_API ss_status ss_correlations(const ss_experiment* exp, const char* selector, const char* out_dir,
                                 char** summary_json);
SS_API ss_status ss_degree_table(const ss_experiment* exp, const char* selector, const size_t* Ns, size_t count,
                                 char** table_json);
/* m_bound < 0 selects the default U(2) range. */
SS_API ss_status ss_repcheck(ss_group group, int max_index, size_t samples, uint64_t seed, int m_bound,
                             int* all_pass, char** table_json);

/* Complex values are interleaved (re, im), matrices row-major. g holds a
 * 2x2 matrix (8 doubles); out must hold 2 (n+1)^2 doubles. */
SS_API ss_status ss_su2_irrep(int n, const double* g, double* out, size_t out_len);
SS_API ss_status ss_u2_irrep(int m, int n, const double* g, double* out, size_t out_len);
/* a is an n x n Hermitian matrix (2 n^2 doubles); out receives n ascending eigenvalues. */
SS_API ss_status ss_hermitian_eigenvalues(size_t n, const double* a, double* out);

#ifdef __cplusplus
}
#endif

#endif
