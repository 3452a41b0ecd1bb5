#ifndef ATTK2_H
#define ATTK2_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Element kind: 0 for nodes, 1 for edges.
 */
#define ATTK2_NODE 0

#define ATTK2_EDGE 1

typedef enum Attk2Status {
  ATTK2_STATUS_OK = 0,
  ATTK2_STATUS_NULL_ARGUMENT = 1,
  ATTK2_STATUS_INVALID_UTF8 = 2,
  ATTK2_STATUS_INVALID_KIND = 3,
  ATTK2_STATUS_NOT_FOUND = 4,
  ATTK2_STATUS_UNKNOWN_LABEL = 5,
  ATTK2_STATUS_ALREADY_EXISTS = 6,
  ATTK2_STATUS_INVALID_INPUT = 7,
  ATTK2_STATUS_PARSE = 8,
  ATTK2_STATUS_CORRUPT = 9,
  ATTK2_STATUS_IO = 10,
  ATTK2_STATUS_OUT_OF_BOUNDS = 11,
  /**
   * A mutation was attempted on a static store.
   */
  ATTK2_STATUS_READ_ONLY = 12,
  ATTK2_STATUS_PANIC = 13,
} Attk2Status;

typedef enum Attk2AttrState {
  /**
   * The value was written to the output string.
   */
  ATTK2_ATTR_STATE_VALUE = 0,
  /**
   * Declared for the type but unset.
   */
  ATTK2_ATTR_STATE_ABSENT = 1,
  /**
   * Not declared for the element's type.
   */
  ATTK2_ATTR_STATE_UNDEFINED = 2,
} Attk2AttrState;

/**
 * Opaque store handle.
 */
typedef struct Attk2Store Attk2Store;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call on the same thread.
 */
const char *attk2_last_error(void);

/**
 * Builds a static store from a bundle directory.
 *
 * # Safety
 * `input_dir` must be a NUL-terminated string; `out` must be writable.
 */
enum Attk2Status attk2_store_build(const char *input_dir, uint32_t k, struct Attk2Store **out);

/**
 * Loads a static store file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum Attk2Status attk2_store_load(const char *path, struct Attk2Store **out);

/**
 * Writes the store to `path`. A dynamic store is frozen first.
 *
 * # Safety
 * `s` must be a live handle and `path` a NUL-terminated string.
 */
enum Attk2Status attk2_store_save(const struct Attk2Store *s, const char *path);

/**
 * Creates an empty dynamic store.
 *
 * # Safety
 * `out` must be writable.
 */
enum Attk2Status attk2_store_new_dynamic(uint32_t k, struct Attk2Store **out);

/**
 * New dynamic store holding the contents of `s`, which is left untouched.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum Attk2Status attk2_store_to_dynamic(const struct Attk2Store *s, struct Attk2Store **out);

/**
 * New static store with the live contents of `s`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum Attk2Status attk2_store_freeze(const struct Attk2Store *s, struct Attk2Store **out);

/**
 * Writes 1 to `out` for a dynamic store and 0 for a static one.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum Attk2Status attk2_store_is_dynamic(const struct Attk2Store *s, uint32_t *out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void attk2_store_free(struct Attk2Store *s);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void attk2_string_free(char *s);

/**
 * # Safety
 * `ids` and `len` must be exactly as returned by this library, or `ids` null.
 */
void attk2_ids_free(uint64_t *ids, size_t len);

/**
 * Labels of one kind, sorted and joined by tabs.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum Attk2Status attk2_get_types(const struct Attk2Store *s, uint32_t kind_, char **out);

/**
 * # Safety
 * `s` must be a live handle, `label` a NUL-terminated string, outputs writable.
 */
enum Attk2Status attk2_scan(const struct Attk2Store *s,
                            uint32_t kind_,
                            const char *label,
                            uint64_t **out,
                            size_t *out_len);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum Attk2Status attk2_get_type(const struct Attk2Store *s,
                                uint32_t kind_,
                                uint64_t id,
                                char **out);

/**
 * Writes the state to `state` and, for [`Attk2AttrState::Value`], the
 * value to `out`. Otherwise `out` is set to null.
 *
 * # Safety
 * `s` must be a live handle, `att` a NUL-terminated string, outputs writable.
 */
enum Attk2Status attk2_get_attribute(const struct Attk2Store *s,
                                     uint32_t kind_,
                                     uint64_t id,
                                     const char *att,
                                     enum Attk2AttrState *state,
                                     char **out);

/**
 * Elements of type `label` whose attribute equals `value`. `defined` is set
 * to 0, with an empty result, when the type lacks the attribute.
 *
 * # Safety
 * `s` must be a live handle, strings NUL-terminated, outputs writable.
 */
enum Attk2Status attk2_select(const struct Attk2Store *s,
                              uint32_t kind_,
                              const char *label,
                              const char *att,
                              const char *value,
                              uint32_t *defined,
                              uint64_t **out,
                              size_t *out_len);

/**
 * # Safety
 * `s` must be a live handle, `node_label` NUL-terminated, outputs writable.
 */
enum Attk2Status attk2_neighbors(const struct Attk2Store *s,
                                 const char *node_label,
                                 uint64_t id,
                                 uint64_t **out,
                                 size_t *out_len);

/**
 * # Safety
 * `s` must be a live handle, `edge_label` NUL-terminated, outputs writable.
 */
enum Attk2Status attk2_related(const struct Attk2Store *s,
                               const char *edge_label,
                               uint64_t id,
                               uint64_t **out,
                               size_t *out_len);

/**
 * Ids of the edges from `u` to `v`.
 *
 * # Safety
 * `s` must be a live handle; outputs writable.
 */
enum Attk2Status attk2_edges_between(const struct Attk2Store *s,
                                     uint64_t u,
                                     uint64_t v,
                                     uint64_t **out,
                                     size_t *out_len);

/**
 * Runs a query script (the CLI `query` format) and returns its output.
 *
 * # Safety
 * `s` must be a live handle, `script` NUL-terminated, `out` writable.
 */
enum Attk2Status attk2_run_script(const struct Attk2Store *s, const char *script, char **out);

/**
 * # Safety
 * `s` must be a live handle and `label` NUL-terminated.
 */
enum Attk2Status attk2_add_type(struct Attk2Store *s, uint32_t kind_, const char *label);

/**
 * Declares attribute `name` on a type; `dense` is 0 or 1.
 *
 * # Safety
 * `s` must be a live handle and strings NUL-terminated.
 */
enum Attk2Status attk2_add_attribute(struct Attk2Store *s,
                                     uint32_t kind_,
                                     const char *label,
                                     const char *name,
                                     uint32_t dense);

/**
 * Adds a node with `count` attributes given as parallel arrays.
 *
 * # Safety
 * `s` must be a live handle, `names` and `values` hold `count`
 * NUL-terminated strings, `out_id` writable.
 */
enum Attk2Status attk2_add_node(struct Attk2Store *s,
                                const char *label,
                                const char *const *names,
                                const char *const *values,
                                size_t count,
                                uint64_t *out_id);

/**
 * Adds an edge from `u` to `v`; attributes as in [`attk2_add_node`].
 *
 * # Safety
 * As for [`attk2_add_node`].
 */
enum Attk2Status attk2_add_edge(struct Attk2Store *s,
                                const char *label,
                                uint64_t u,
                                uint64_t v,
                                const char *const *names,
                                const char *const *values,
                                size_t count,
                                uint64_t *out_id);

/**
 * # Safety
 * `s` must be a live handle and strings NUL-terminated.
 */
enum Attk2Status attk2_set_attribute(struct Attk2Store *s,
                                     uint32_t kind_,
                                     uint64_t id,
                                     const char *att,
                                     const char *value);

/**
 * # Safety
 * `s` must be a live handle.
 */
enum Attk2Status attk2_remove_edge(struct Attk2Store *s, uint64_t id);

/**
 * Removes a node without incident edges. Its id is not reused.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum Attk2Status attk2_remove_node(struct Attk2Store *s, uint64_t id);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATTK2_H */
