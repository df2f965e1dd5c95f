#ifndef XLAB_H
#define XLAB_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum XlabStatus {
  XLAB_STATUS_OK = 0,
  XLAB_STATUS_NULL_POINTER = 1,
  XLAB_STATUS_INVALID_UTF8 = 2,
  XLAB_STATUS_PARSE = 3,
  XLAB_STATUS_VALIDATION = 4,
  XLAB_STATUS_DEGENERATE = 5,
  XLAB_STATUS_RESOURCE = 6,
  XLAB_STATUS_PRECONDITION = 7,
  XLAB_STATUS_MISMATCH = 8,
  XLAB_STATUS_UNKNOWN = 9,
  XLAB_STATUS_IO = 10,
  XLAB_STATUS_BUFFER_TOO_SMALL = 11,
  XLAB_STATUS_PANIC = 12,
} XlabStatus;

/**
 * Opaque pattern graph.
 */
typedef struct XlabGraph XlabGraph;

/**
 * Opaque finite Markov space, in f64 or exact rational arithmetic.
 */
typedef struct XlabSpace XlabSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful one. Valid until the next call on the same thread.
 */
const char *xlab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xlab_version(void);

/**
 * Parses a graph in edge-list text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum XlabStatus xlab_graph_parse(const char *text, struct XlabGraph **out);

/**
 * Builds a named pattern such as `K_4`, `C_5`, `P_3`, `S_4`, `Q_3` or `K_2x3`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum XlabStatus xlab_graph_named(const char *name, struct XlabGraph **out);

/**
 * # Safety
 * `g` must be a live graph handle; `vertices` and `edges` must be writable.
 */
enum XlabStatus xlab_graph_size(const struct XlabGraph *g, uintptr_t *vertices, uintptr_t *edges);

/**
 * Releases a graph. NULL is ignored.
 *
 * # Safety
 * `g` must be NULL or a handle not yet freed.
 */
void xlab_graph_free(struct XlabGraph *g);

/**
 * Builds an f64 space from a row-major `n x n` edge-mass matrix. With
 * `normalize` nonzero the matrix is scaled to total mass one.
 *
 * # Safety
 * `eta` must point to `n * n` doubles; `out` must be writable.
 */
enum XlabStatus xlab_space_from_matrix(const double *eta,
                                       uintptr_t n,
                                       int32_t normalize,
                                       struct XlabSpace **out);

/**
 * Parses a space from its JSON description (f64 or rational mode).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum XlabStatus xlab_space_from_json(const char *json, struct XlabSpace **out);

/**
 * Number of atoms, and whether the space uses exact rationals.
 *
 * # Safety
 * `s` must be a live space handle; `atoms` and `rational` must be writable.
 */
enum XlabStatus xlab_space_info(const struct XlabSpace *s, uintptr_t *atoms, int32_t *rational);

/**
 * Releases a space. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a handle not yet freed.
 */
void xlab_space_free(struct XlabSpace *s);

/**
 * Homomorphism density `t(G, W)`, or the hom-measure total mass when
 * `normalized` is zero. Rational spaces are evaluated exactly and rounded.
 *
 * # Safety
 * `g` and `s` must be live handles; `out` must be writable.
 */
enum XlabStatus xlab_density(const struct XlabGraph *g,
                             const struct XlabSpace *s,
                             int32_t normalized,
                             double *out);

/**
 * Exact density as a reduced fraction `p/q` (or integer) for rational
 * spaces. `len` receives the string length; a buffer of `len + 1` bytes
 * always suffices.
 *
 * # Safety
 * `g` and `s` must be live handles; `buf` must hold `cap` bytes; `len`
 * must be writable.
 */
enum XlabStatus xlab_density_exact(const struct XlabGraph *g,
                                   const struct XlabSpace *s,
                                   int32_t normalized,
                                   char *buf,
                                   uintptr_t cap,
                                   uintptr_t *len);

/**
 * Eigenvalues of the adjacency operator, sorted descending. `len`
 * receives the atom count; `XLAB_STATUS_BUFFER_TOO_SMALL` is returned when
 * `cap` is below it.
 *
 * # Safety
 * `s` must be a live handle; `values` must hold `cap` doubles; `len`
 * must be writable.
 */
enum XlabStatus xlab_spectrum(const struct XlabSpace *s,
                              double *values,
                              uintptr_t cap,
                              uintptr_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XLAB_H */
