/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef EBFVM_H
#define EBFVM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum EbfvmStatus {
  EBFVM_STATUS_OK = 0,
  EBFVM_STATUS_NULL_POINTER = 1,
  EBFVM_STATUS_INVALID_UTF8 = 2,
  /**
   * Case text or file rejected.
   */
  EBFVM_STATUS_CONFIG = 3,
  /**
   * The journal touches the bushing somewhere on the surface.
   */
  EBFVM_STATUS_CONTACT = 4,
  /**
   * The outer loop stopped at its iteration limit. Results are still
   * produced.
   */
  EBFVM_STATUS_NOT_CONVERGED = 5,
  /**
   * A caller buffer is too small.
   */
  EBFVM_STATUS_BUFFER_TOO_SMALL = 6,
  EBFVM_STATUS_IO = 7,
  /**
   * Any other solver failure.
   */
  EBFVM_STATUS_FAILED = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  EBFVM_STATUS_PANIC = 9,
} EbfvmStatus;

/**
 * Nodal fields on the surface mesh.
 */
typedef enum EbfvmField {
  EBFVM_FIELD_PRESSURE = 0,
  EBFVM_FIELD_FILL_FRACTION = 1,
  EBFVM_FIELD_FILM_THICKNESS = 2,
  EBFVM_FIELD_MIDPLANE_TEMPERATURE = 3,
  EBFVM_FIELD_X = 4,
  EBFVM_FIELD_Y = 5,
} EbfvmField;

/**
 * Opaque case configuration.
 */
typedef struct EbfvmCase EbfvmCase;

/**
 * Opaque solution of one run.
 */
typedef struct EbfvmResults EbfvmResults;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ebfvm_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ebfvm_last_error(void);

/**
 * Built-in reference bearing.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EbfvmStatus ebfvm_case_reference(struct EbfvmCase **out);

/**
 * Parses case text.
 *
 * # Safety
 * `case_text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum EbfvmStatus ebfvm_case_parse(const char *case_text, struct EbfvmCase **out);

/**
 * Reads and parses a case file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer.
 */
enum EbfvmStatus ebfvm_case_load(const char *path, struct EbfvmCase **out);

/**
 * Overrides the coupling switches of a case.
 *
 * # Safety
 * `case` must come from one of the `ebfvm_case_*` constructors.
 */
enum EbfvmStatus ebfvm_case_set_coupling(struct EbfvmCase *case_,
                                         bool isothermal,
                                         bool equilibrium);

/**
 * Sets the surface mesh resolution.
 *
 * # Safety
 * `case` must come from one of the `ebfvm_case_*` constructors.
 */
enum EbfvmStatus ebfvm_case_set_mesh(struct EbfvmCase *case_,
                                     size_t nx,
                                     size_t ny,
                                     size_t n_layers);

/**
 * Releases a case; null is ignored.
 *
 * # Safety
 * `case` must come from an `ebfvm_case_*` constructor and not be used again.
 */
void ebfvm_case_free(struct EbfvmCase *case_);

/**
 * Runs a case. On [`EbfvmStatus::Ok`] and [`EbfvmStatus::NotConverged`]
 * `*out` receives a results handle; otherwise it is set to null.
 *
 * # Safety
 * `case` must be a live case handle and `out` a valid pointer.
 */
enum EbfvmStatus ebfvm_run(const struct EbfvmCase *case_, struct EbfvmResults **out);

/**
 * Releases results; null is ignored.
 *
 * # Safety
 * `results` must come from [`ebfvm_run`] and not be used again.
 */
void ebfvm_results_free(struct EbfvmResults *results);

/**
 * Number of surface nodes, or zero for a null handle.
 *
 * # Safety
 * `results` must be null or a live results handle.
 */
size_t ebfvm_results_node_count(const struct EbfvmResults *results);

/**
 * Copies a nodal field into `buf`, which must hold at least
 * `ebfvm_results_node_count` values. Temperatures are in kelvin.
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
enum EbfvmStatus ebfvm_results_field(const struct EbfvmResults *results,
                                     enum EbfvmField field,
                                     double *buf,
                                     size_t len);

/**
 * Film reaction `[W_X, W_Y, M_X, M_Y]` and journal position `[X, Y, A, B]`;
 * either pointer may be null.
 *
 * # Safety
 * Non-null pointers must each hold four writable doubles.
 */
enum EbfvmStatus ebfvm_results_equilibrium(const struct EbfvmResults *results,
                                           double *loads,
                                           double *position);

/**
 * Whether the outer loop met its tolerance.
 *
 * # Safety
 * `results` must be null or a live results handle.
 */
bool ebfvm_results_converged(const struct EbfvmResults *results);

/**
 * Writes the output files selected by the case into `dir`.
 *
 * # Safety
 * Handles must be live; `dir` must be NUL-terminated.
 */
enum EbfvmStatus ebfvm_results_write(const struct EbfvmResults *results,
                                     const struct EbfvmCase *case_,
                                     const char *dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EBFVM_H */
