/* sat2tri C ABI. Generated by cbindgen; do not edit. */

#ifndef SAT2TRI_H
#define SAT2TRI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum Sat2TriStatus {
  Sat2TriStatus_Ok = 0,
  Sat2TriStatus_NullArgument = 1,
  Sat2TriStatus_InvalidUtf8 = 2,
  Sat2TriStatus_ParseError = 3,
  Sat2TriStatus_CompileError = 4,
  Sat2TriStatus_Unsupported = 5,
  Sat2TriStatus_Panic = 6,
} Sat2TriStatus;

/**
 * Opaque parsed formula.
 */
typedef struct Sat2TriFormula Sat2TriFormula;

/**
 * Opaque compilation output (triangulation plus certificate).
 */
typedef struct Sat2TriResult Sat2TriResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent error on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never null.
 */
const char *sat2tri_last_error(void);

/**
 * Parse an expression-syntax formula (e.g. `(a | b) & ~c`).
 *
 * # Safety
 * `expr` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_formula_parse(const char *expr, struct Sat2TriFormula **out);

/**
 * Parse a DIMACS CNF file body.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_formula_parse_dimacs(const char *text, struct Sat2TriFormula **out);

/**
 * Release a formula handle. Null is ignored.
 *
 * # Safety
 * `f` must be a pointer previously returned by a parse function, or null.
 */
void sat2tri_formula_free(struct Sat2TriFormula *f);

/**
 * The formula's length |Q| (occurrences plus operators).
 *
 * # Safety
 * `f` must be a valid formula handle.
 */
uint64_t sat2tri_formula_length(const struct Sat2TriFormula *f);

/**
 * Brute-force satisfiability. Writes 1 (satisfiable) or 0 to `out`.
 *
 * # Safety
 * `f` must be a valid formula handle and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_formula_satisfiable(const struct Sat2TriFormula *f, int *out);

/**
 * Compile the formula in abstract block mode.
 *
 * # Safety
 * `f` must be a valid formula handle and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_compile(const struct Sat2TriFormula *f, struct Sat2TriResult **out);

/**
 * Release a compilation result. Null is ignored.
 *
 * # Safety
 * `r` must be a pointer previously returned by `sat2tri_compile`, or null.
 */
void sat2tri_result_free(struct Sat2TriResult *r);

/**
 * Total tetrahedron count of the compiled manifold.
 *
 * # Safety
 * `r` must be a valid result handle.
 */
uint64_t sat2tri_result_tet_count(const struct Sat2TriResult *r);

/**
 * The certificate as a JSON string; free with `sat2tri_string_free`.
 *
 * # Safety
 * `r` must be a valid result handle and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_result_certificate_json(const struct Sat2TriResult *r, char **out);

/**
 * The gluing table in the `tri` text format; free with `sat2tri_string_free`.
 *
 * # Safety
 * `r` must be a valid result handle and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_result_tri_text(const struct Sat2TriResult *r, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be a pointer previously returned through a `char **`
 * out-parameter of this library, or null.
 */
void sat2tri_string_free(char *s);

/**
 * Exact Farey-graph distance between two slopes given as strings
 * (`p/q`, an integer, or `inf`).
 *
 * # Safety
 * `a` and `b` must be valid NUL-terminated strings and `out` a valid pointer.
 */
enum Sat2TriStatus sat2tri_farey_distance(const char *a, const char *b, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAT2TRI_H */
