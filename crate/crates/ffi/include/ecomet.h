#ifndef ECOMET_H
#define ECOMET_H

/* Generated by cbindgen from ecomet-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C-ABI call.
 */
typedef enum EcometStatus {
  /**
   * Success.
   */
  ECOMET_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ECOMET_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ECOMET_STATUS_INVALID_UTF8 = 2,
  /**
   * The input file could not be read.
   */
  ECOMET_STATUS_IO = 3,
  /**
   * The input could not be parsed.
   */
  ECOMET_STATUS_PARSE = 4,
  /**
   * The computation rejected its inputs (unknown variable, rank
   * deficiency, domain error, ...).
   */
  ECOMET_STATUS_ANALYSIS = 5,
  /**
   * The consistency suite ran and at least one check failed.
   */
  ECOMET_STATUS_CHECKS_FAILED = 6,
} EcometStatus;

/**
 * Opaque dataset handle created by the load functions and released with
 * [`ecomet_dataset_free`].
 */
typedef struct EcometDataset EcometDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads an aligned dataset from a CSV file (first column YEAR, remaining
 * columns variables; empty cells trigger listwise deletion).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On `ECOMET_STATUS_OK`, `*out` owns the dataset and must be
 * released with [`ecomet_dataset_free`].
 */
enum EcometStatus ecomet_dataset_load_csv(const char *path, struct EcometDataset **out);

/**
 * Loads an aligned dataset from CSV text.
 *
 * # Safety
 * Same contract as [`ecomet_dataset_load_csv`], with `text` holding the CSV
 * content itself.
 */
enum EcometStatus ecomet_dataset_from_csv_text(const char *text, struct EcometDataset **out);

/**
 * Releases a dataset handle. Null is ignored.
 *
 * # Safety
 * `ds` must be null or a pointer previously returned by a load function and
 * not yet freed.
 */
void ecomet_dataset_free(struct EcometDataset *ds);

/**
 * Number of observations (rows); 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a valid dataset handle.
 */
size_t ecomet_dataset_observation_count(const struct EcometDataset *ds);

/**
 * Number of variables; 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a valid dataset handle.
 */
size_t ecomet_dataset_variable_count(const struct EcometDataset *ds);

/**
 * Name of the variable at `index`, or null when out of range. The caller
 * frees the string with [`ecomet_string_free`].
 *
 * # Safety
 * `ds` must be null or a valid dataset handle.
 */
char *ecomet_dataset_variable_name(const struct EcometDataset *ds, size_t index);

/**
 * Pairwise correlation matrix as JSON. `vars_csv` is a comma-separated list
 * of variable names, or null for all variables.
 *
 * # Safety
 * `ds` must be a valid dataset handle; `vars_csv` null or a valid string;
 * `out_json` a valid pointer. On `ECOMET_STATUS_OK` the caller frees
 * `*out_json` with [`ecomet_string_free`].
 */
enum EcometStatus ecomet_correlation_matrix_json(const struct EcometDataset *ds,
                                                 const char *vars_csv,
                                                 char **out_json);

/**
 * Fits `dependent ~ (Constant) + predictors` and returns the model as JSON.
 *
 * # Safety
 * `ds` must be a valid dataset handle; `dependent` and `predictors_csv`
 * valid strings; `out_json` a valid pointer (freed by the caller).
 */
enum EcometStatus ecomet_regression_json(const struct EcometDataset *ds,
                                         const char *dependent,
                                         const char *predictors_csv,
                                         char **out_json);

/**
 * Runs the staged analysis (index screen, price link, rate model,
 * investment model) and returns the full result as JSON.
 *
 * # Safety
 * `ds` must be a valid dataset handle; the name arguments valid strings;
 * `out_json` a valid pointer (freed by the caller).
 */
enum EcometStatus ecomet_staged_analysis_json(const struct EcometDataset *ds,
                                              const char *indices_csv,
                                              const char *price,
                                              const char *rate,
                                              const char *investment,
                                              char **out_json);

/**
 * Runs the published-statistics consistency suite. `fixture_toml` is TOML
 * text for an alternate fixture, or null for the bundled one. Writes the
 * check report JSON either way; returns `ECOMET_STATUS_CHECKS_FAILED` when
 * any check fails.
 *
 * # Safety
 * `fixture_toml` must be null or a valid string; `out_json` a valid pointer
 * (freed by the caller).
 */
enum EcometStatus ecomet_paper_verify_json(const char *fixture_toml, char **out_json);

/**
 * Two-tailed p-value of a t statistic.
 *
 * # Safety
 * `out_p` must be a valid pointer.
 */
enum EcometStatus ecomet_t_two_tailed_p(double t, uint64_t df, double *out_p);

/**
 * Upper-tail p-value of an F statistic.
 *
 * # Safety
 * `out_p` must be a valid pointer.
 */
enum EcometStatus ecomet_f_upper_tail_p(double f, uint64_t df1, uint64_t df2, double *out_p);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string pointer returned by this library and not yet
 * freed.
 */
void ecomet_string_free(char *s);

/**
 * The calling thread's last error message (empty string when none). The
 * caller frees it with [`ecomet_string_free`].
 */
char *ecomet_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECOMET_H */
