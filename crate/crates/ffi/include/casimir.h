#ifndef CASIMIR_H
#define CASIMIR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum CasimirStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  CASIMIR_STATUS_OK = 0,
  CASIMIR_STATUS_NULL_POINTER = 1,
  CASIMIR_STATUS_INVALID_UTF8 = 2,
  CASIMIR_STATUS_INVALID_PARAMETER = 3,
  CASIMIR_STATUS_UNKNOWN_PRESET = 4,
  CASIMIR_STATUS_CONFIG = 5,
  CASIMIR_STATUS_NUMERICAL = 6,
  CASIMIR_STATUS_IO = 7,
  CASIMIR_STATUS_PANIC = 8,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum CasimirStatus CasimirStatus;
#else
typedef int32_t CasimirStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Run configuration handle.
 */
typedef struct CasimirConfig CasimirConfig;

/**
 * Evaluated result handle.
 */
typedef struct CasimirResult CasimirResult;

/**
 * Closed-form momenta (kg·m/s) and dimensionless diagnostics. Ratios are NaN
 * when E₀×B₀ vanishes.
 */
typedef struct CasimirClosedForm {
  double classical[3];
  double casimir_k1[3];
  double casimir_k2[3];
  double k1_over_classical;
  double k2_over_classical;
  double doppler_bound;
  double anisotropy;
} CasimirClosedForm;

/**
 * Classical velocity |α(0)E₀B₀|/M under the SI and polarizability-volume readings (m/s).
 */
typedef struct CasimirVelocities {
  double v_si;
  double v_volume;
} CasimirVelocities;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *casimir_last_error(void);

/**
 * Static string naming the physical-constants set.
 */
const char *casimir_constants_version(void);

/**
 * Creates a config from a preset name ("hydrogen", "equal-mass", "positronium-like").
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
CasimirStatus casimir_config_preset(const char *name, struct CasimirConfig **out);

/**
 * Parses config text in the CLI's `key = value` format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
CasimirStatus casimir_config_parse(const char *text, struct CasimirConfig **out);

/**
 * Sets the evaluation mode: "closed-form", "numeric", "oracle" or "scan".
 *
 * # Safety
 * `config` must come from this library and `mode` be a NUL-terminated string.
 */
CasimirStatus casimir_config_set_mode(struct CasimirConfig *config, const char *mode);

/**
 * Sets the static fields (V/m and T).
 *
 * # Safety
 * `config` must come from this library; `e0` and `b0` must point to three doubles each.
 */
CasimirStatus casimir_config_set_fields(struct CasimirConfig *config,
                                        const double *e0,
                                        const double *b0);

/**
 * Releases a config. Null is accepted.
 *
 * # Safety
 * `config` must be null or come from this library and not be used afterwards.
 */
void casimir_config_free(struct CasimirConfig *config);

/**
 * Evaluates a config in its mode.
 *
 * # Safety
 * `config` must come from this library and `out` be a valid pointer.
 */
CasimirStatus casimir_evaluate(const struct CasimirConfig *config, struct CasimirResult **out);

/**
 * Copies the closed-form block of a result.
 *
 * # Safety
 * `result` must come from this library and `out` be a valid pointer.
 */
CasimirStatus casimir_result_closed_form(const struct CasimirResult *result,
                                         struct CasimirClosedForm *out);

/**
 * Copies the classical velocity under both polarizability conventions.
 *
 * # Safety
 * `result` must come from this library and `out` be a valid pointer.
 */
CasimirStatus casimir_result_velocities(const struct CasimirResult *result,
                                        struct CasimirVelocities *out);

/**
 * Renormalized E₀×B₀ momentum from the numeric engine (kg·m/s); requires mode "numeric".
 *
 * # Safety
 * `result` must come from this library and `out` point to three doubles.
 */
CasimirStatus casimir_result_renormalized(const struct CasimirResult *result, double *out);

/**
 * The full result as JSON. Release with [`casimir_string_free`].
 *
 * # Safety
 * `result` must come from this library and `out` be a valid pointer.
 */
CasimirStatus casimir_result_json(const struct CasimirResult *result, char **out);

/**
 * Releases a result. Null is accepted.
 *
 * # Safety
 * `result` must be null or come from this library and not be used afterwards.
 */
void casimir_result_free(struct CasimirResult *result);

/**
 * Releases a string returned by this library. Null is accepted.
 *
 * # Safety
 * `s` must be null or come from this library and not be used afterwards.
 */
void casimir_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASIMIR_H */
