#ifndef PSO_H
#define PSO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsoStatus {
  PSO_STATUS_OK = 0,
  PSO_STATUS_INVALID_ARGUMENT = 1,
  PSO_STATUS_NULL_POINTER = 2,
  PSO_STATUS_VERIFICATION_FAILED = 3,
  PSO_STATUS_INTERNAL = 4,
} PsoStatus;

// Levels `0..=max_level` of a Fock space, built once.
typedef struct PsoFock PsoFock;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into the library.
const char *pso_last_error(void);

// Dimension of the span closed under the graded bracket at rank `n`.
//
// # Safety
// `out` must be null or writable.
enum PsoStatus pso_closure_dim(uint32_t n, uint64_t *out);

// Checks one triple-relation family (`"parafermion"`, `"paraboson"`,
// `"relative-paraboson"`, `"relative-parafermion"`) at rank `n`.
// Returns `VERIFICATION_FAILED` if any instance fails; counts are written either way.
//
// # Safety
// `family` must be null or a nul-terminated string; `instances` and `failed` null or writable.
enum PsoStatus pso_relation_check(const char *family,
                                  uint32_t n,
                                  uint64_t *instances,
                                  uint64_t *failed);

// Builds levels `0..=max_level` of the order `p_num/p_den` Fock space of rank `n`.
//
// # Safety
// `out` must be null or writable.
enum PsoStatus pso_fock_new(uint32_t n,
                            int64_t p_num,
                            int64_t p_den,
                            uint32_t max_level,
                            struct PsoFock **out);

// Releases a handle from [`pso_fock_new`]; null is ignored.
//
// # Safety
// `fock` must be null or a handle from [`pso_fock_new`] not yet freed.
void pso_fock_free(struct PsoFock *fock);

// Dimension table as JSON; free the string with [`pso_string_free`].
//
// # Safety
// `fock` must be null or a live handle; `out` null or writable.
enum PsoStatus pso_fock_json(const struct PsoFock *fock, char **out);

// Dimension of the quotient at `level`, summed over weights.
//
// # Safety
// `fock` must be null or a live handle; `out` null or writable.
enum PsoStatus pso_fock_level_dim(const struct PsoFock *fock, uint32_t level, uint64_t *out);

// `⟨w1|w2⟩` for two creation words, written as a decimal fraction string.
//
// # Safety
// `fock` must be null or a live handle; `w1`/`w2` null or valid for `len1`/`len2` reads; `out` null or writable.
enum PsoStatus pso_fock_inner_product(const struct PsoFock *fock,
                                      const int64_t *w1,
                                      size_t len1,
                                      const int64_t *w2,
                                      size_t len2,
                                      char **out);

// Number of basis patterns at `level` for rank `n` and integer order `p`.
//
// # Safety
// `out` must be null or writable.
enum PsoStatus pso_gz_count(uint32_t n, int64_t p, uint32_t level, uint64_t *out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void pso_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSO_H */
