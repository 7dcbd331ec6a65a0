#ifndef ATTENUWAVE_H
#define ATTENUWAVE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AwStatus {
  AW_STATUS_OK = 0,
  AW_STATUS_NULL_POINTER = 1,
  AW_STATUS_INVALID_MODEL = 2,
  AW_STATUS_INVALID_ARGUMENT = 3,
  AW_STATUS_DOMAIN = 4,
  AW_STATUS_NUMERICAL = 5,
  AW_STATUS_PARSE = 6,
  AW_STATUS_PANIC = 7,
} AwStatus;

typedef enum AwVerdict {
  AW_VERDICT_CERTIFIED_CAUSAL = 0,
  AW_VERDICT_REFUTED = 1,
  AW_VERDICT_INCONCLUSIVE = 2,
} AwVerdict;

/**
 * Dispersion model.
 */
typedef struct AwModel AwModel;

/**
 * Causality report.
 */
typedef struct AwReport AwReport;

/**
 * Sampled time signal.
 */
typedef struct AwSignal AwSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. Valid until the
 * next failing call on the same thread.
 */
const char *aw_last_error(void);

/**
 * Model from its flat JSON record, e.g. `{"kind":"Szabo","gamma":0.5,"alpha0":1,"c0":1}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AwStatus aw_model_from_json(const char *json, struct AwModel **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum AwStatus aw_model_power_law(double gamma,
                                 double alpha0,
                                 double omega0,
                                 double c0,
                                 struct AwModel **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum AwStatus aw_model_szabo(double gamma, double alpha0, double c0, struct AwModel **out);

/**
 * `c1` is the trial bound speed.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AwStatus aw_model_thermo_viscous(double tau0, double c0, double c1, struct AwModel **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum AwStatus aw_model_kowar_modified(double gamma,
                                      double tau0,
                                      double c0,
                                      double c1,
                                      struct AwModel **out);

/**
 * # Safety
 * `model` must come from an `aw_model_*` constructor or be null.
 */
void aw_model_free(struct AwModel *model);

/**
 * `alpha*(omega)` at real `omega`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AwStatus aw_alpha_star(const struct AwModel *model, double omega, double *re, double *im);

/**
 * Certify with the model's standard scan and the default CR tolerance.
 *
 * # Safety
 * `model` and `out` must be valid.
 */
enum AwStatus aw_certify(const struct AwModel *model, struct AwReport **out);

/**
 * # Safety
 * `report` must be valid.
 */
enum AwVerdict aw_report_verdict(const struct AwReport *report);

/**
 * JSON form of the report; release with [`aw_string_free`].
 *
 * # Safety
 * `report` and `out` must be valid.
 */
enum AwStatus aw_report_json(const struct AwReport *report, char **out);

/**
 * # Safety
 * `report` must come from [`aw_certify`] or be null.
 */
void aw_report_free(struct AwReport *report);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void aw_string_free(char *s);

/**
 * Shifted Green shell at radius `r` on the grid `(n, domega)`.
 *
 * # Safety
 * `model` and `out` must be valid.
 */
enum AwStatus aw_synth_shell(const struct AwModel *model,
                             double r,
                             size_t n,
                             double domega,
                             struct AwSignal **out);

/**
 * # Safety
 * `signal` must be valid.
 */
size_t aw_signal_len(const struct AwSignal *signal);

/**
 * # Safety
 * `signal` must be valid.
 */
double aw_signal_t0(const struct AwSignal *signal);

/**
 * # Safety
 * `signal` must be valid.
 */
double aw_signal_dt(const struct AwSignal *signal);

/**
 * Numerical floor recorded during synthesis.
 *
 * # Safety
 * `signal` must be valid.
 */
double aw_signal_floor(const struct AwSignal *signal);

/**
 * Borrowed sample buffer of length [`aw_signal_len`], valid while `signal` lives.
 *
 * # Safety
 * `signal` must be valid or null.
 */
const double *aw_signal_samples(const struct AwSignal *signal);

/**
 * # Safety
 * `signal` must come from this library or be null.
 */
void aw_signal_free(struct AwSignal *signal);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATTENUWAVE_H */
