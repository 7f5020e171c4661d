#ifndef KGO_H
#define KGO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KgoBranch {
  KgoBranch_Particle = 0,
  KgoBranch_Antiparticle = 1,
} KgoBranch;

typedef enum KgoSpace {
  KgoSpace_Coordinate = 0,
  KgoSpace_Momentum = 1,
} KgoSpace;

/**
 * Result of every fallible call.
 */
typedef enum KgoStatus {
  KgoStatus_Ok = 0,
  KgoStatus_InvalidArgument = 1,
  KgoStatus_NoPhysicalRoot = 2,
  KgoStatus_NonNormalizable = 3,
  KgoStatus_InvalidDensity = 4,
  KgoStatus_NoConvergence = 5,
  KgoStatus_InternalPanic = 6,
} KgoStatus;

/**
 * Opaque measure-report handle.
 */
typedef struct KgoReport KgoReport;

/**
 * Opaque normalized state handle.
 */
typedef struct KgoState KgoState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Energy of level `n`; writes the eigenvalue to `out_energy`.
 *
 * # Safety
 * `out_energy` must be a valid pointer to writable memory.
 */
enum KgoStatus kgo_energy(double gamma, uint32_t n, enum KgoBranch branch, double *out_energy);

/**
 * Saturation asymptote `1/|gamma|`; fails for `gamma = 0`.
 *
 * # Safety
 * `out_asymptote` must be a valid pointer to writable memory.
 */
enum KgoStatus kgo_asymptote(double gamma, double *out_asymptote);

/**
 * Build a normalized state; on success `*out_state` owns the handle.
 *
 * # Safety
 * `out_state` must be a valid pointer to writable memory.
 */
enum KgoStatus kgo_state_new(double gamma,
                             uint32_t n,
                             enum KgoBranch branch,
                             enum KgoSpace space,
                             struct KgoState **out_state);

/**
 * Release a state handle. Null is a no-op.
 *
 * # Safety
 * `state` must be null or a pointer obtained from `kgo_state_new`.
 */
void kgo_state_free(struct KgoState *state);

/**
 * Truncation radius of the state's numerical domain.
 *
 * # Safety
 * `state` must be a valid handle; `out` a valid writable pointer.
 */
enum KgoStatus kgo_state_radius(const struct KgoState *state, double *out);

/**
 * Probability density at `a`.
 *
 * # Safety
 * `state` must be a valid handle; `out` a valid writable pointer.
 */
enum KgoStatus kgo_state_rho(const struct KgoState *state, double a, double *out);

/**
 * Fisher information density at `a`; fails if the weight changes sign.
 *
 * # Safety
 * `state` must be a valid handle; `out` a valid writable pointer.
 */
enum KgoStatus kgo_state_fisher_density(const struct KgoState *state, double a, double *out);

/**
 * Shannon entropy density `ρ ln ρ` at `a`; fails if the weight changes sign.
 *
 * # Safety
 * `state` must be a valid handle; `out` a valid writable pointer.
 */
enum KgoStatus kgo_state_shannon_density(const struct KgoState *state, double a, double *out);

/**
 * Compute the full measure report for `(gamma, n)` on the given branch.
 *
 * # Safety
 * `out_report` must be a valid pointer to writable memory.
 */
enum KgoStatus kgo_report_new(double gamma,
                              uint32_t n,
                              enum KgoBranch branch,
                              struct KgoReport **out_report);

/**
 * Release a report handle. Null is a no-op.
 *
 * # Safety
 * `report` must be null or a pointer obtained from `kgo_report_new`.
 */
void kgo_report_free(struct KgoReport *report);

/**
 * Serialize a report as JSON; the string must be released with
 * `kgo_string_free`.
 *
 * # Safety
 * `report` must be a valid handle; `out_json` a valid writable pointer.
 */
enum KgoStatus kgo_report_to_json(const struct KgoReport *report, char **out_json);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer obtained from `kgo_report_to_json`.
 */
void kgo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGO_H */
