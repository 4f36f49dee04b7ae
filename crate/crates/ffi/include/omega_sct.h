#ifndef OMEGA_SCT_H
#define OMEGA_SCT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OmegaEngine {
  /**
   * Size-change graph closure; SCT only.
   */
  OMEGA_ENGINE_LJB = 0,
  /**
   * Double-graph Ramsey search.
   */
  OMEGA_ENGINE_RAMSEY_DGS = 1,
  /**
   * Single-graph Ramsey search; containment and SCT only.
   */
  OMEGA_ENGINE_RAMSEY_SGS = 2,
  OMEGA_ENGINE_RANK = 3,
} OmegaEngine;

typedef enum OmegaStatus {
  OMEGA_STATUS_OK = 0,
  OMEGA_STATUS_NULL_POINTER = 1,
  OMEGA_STATUS_INVALID_UTF8 = 2,
  OMEGA_STATUS_PARSE = 3,
  OMEGA_STATUS_INVALID_ARGUMENT = 4,
  OMEGA_STATUS_PRECONDITION = 5,
  OMEGA_STATUS_TOO_LARGE = 6,
  OMEGA_STATUS_TIMEOUT = 7,
  OMEGA_STATUS_INTERNAL = 8,
} OmegaStatus;

typedef enum OmegaImplied {
  OMEGA_IMPLIED_NONE = 0,
  OMEGA_IMPLIED_EQUALITY = 1,
  OMEGA_IMPLIED_FULL = 2,
} OmegaImplied;

/**
 * Opaque Büchi automaton.
 */
typedef struct OmegaAutomaton OmegaAutomaton;

/**
 * Opaque size-change termination problem.
 */
typedef struct OmegaSctProblem OmegaSctProblem;

/**
 * Search settings. Start from [`omega_options_default`].
 */
typedef struct OmegaOptions {
  enum OmegaEngine engine;
  bool subsumption;
  /**
   * Negative selects the default bound.
   */
  int32_t max_rank;
  /**
   * Zero means no limit.
   */
  uint64_t timeout_ms;
  /**
   * Single-graph search only: caller vouches for its preconditions.
   */
  bool assert_suffix_closed;
} OmegaOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Subsumption on, default rank bound, no time limit, double-graph search.
 */
struct OmegaOptions omega_options_default(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into this library on the same thread.
 */
const char *omega_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void omega_string_free(char *s);

/**
 * Parses `.ba` text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum OmegaStatus omega_automaton_parse(const char *text_, struct OmegaAutomaton **out);

/**
 * # Safety
 * `b` must be NULL or a handle from this library, not yet freed.
 */
void omega_automaton_free(struct OmegaAutomaton *b);

/**
 * Number of states, or 0 for NULL.
 *
 * # Safety
 * `b` must be NULL or a live handle.
 */
size_t omega_automaton_num_states(const struct OmegaAutomaton *b);

/**
 * Canonical `.ba` text.
 *
 * # Safety
 * `b` must be a live handle; `out` must be writable.
 */
enum OmegaStatus omega_automaton_render(const struct OmegaAutomaton *b, char **out);

/**
 * Universality with the Ramsey (double-graph) or rank engine. On refutation
 * a non-NULL `witness` receives the lasso `u (v)^ω`, else NULL.
 *
 * # Safety
 * `b` must be a live handle, `holds` writable, `witness` NULL or writable.
 */
enum OmegaStatus omega_universal(const struct OmegaAutomaton *b,
                                 struct OmegaOptions opts,
                                 bool *holds,
                                 char **witness);

/**
 * `L(a) ⊆ L(b)`.
 *
 * # Safety
 * As for [`omega_universal`].
 */
enum OmegaStatus omega_contains(const struct OmegaAutomaton *a,
                                const struct OmegaAutomaton *b,
                                struct OmegaOptions opts,
                                bool *holds,
                                char **witness);

/**
 * Parses `.sct` text, pruning functions unreachable from the first one.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum OmegaStatus omega_sct_parse(const char *text_, struct OmegaSctProblem **out);

/**
 * Parses `.mcs` text and projects it to an SCT problem.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum OmegaStatus omega_mcs_project(const char *text_,
                                   enum OmegaImplied implied,
                                   struct OmegaSctProblem **out);

/**
 * # Safety
 * `p` must be NULL or a handle from this library, not yet freed.
 */
void omega_sct_free(struct OmegaSctProblem *p);

/**
 * Canonical `.sct` text.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OmegaStatus omega_sct_render(const struct OmegaSctProblem *p, char **out);

/**
 * Size-change termination with any engine. On non-termination a non-NULL
 * `witness` receives the repeated call sequence, else NULL.
 *
 * # Safety
 * `p` must be a live handle, `terminating` writable, `witness` NULL or
 * writable.
 */
enum OmegaStatus omega_sct_check(const struct OmegaSctProblem *p,
                                 struct OmegaOptions opts,
                                 bool *terminating,
                                 char **witness);

/**
 * The flow automaton and a descent automaton of `p`.
 *
 * # Safety
 * `p` must be a live handle; `flow` and `desc` must be writable.
 */
enum OmegaStatus omega_sct_reduce(const struct OmegaSctProblem *p,
                                  bool optimized,
                                  struct OmegaAutomaton **flow,
                                  struct OmegaAutomaton **desc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMEGA_SCT_H */
