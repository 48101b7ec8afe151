#ifndef ALG2D_H
#define ALG2D_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Alg2dAutMethod {
  ALG2D_AUT_METHOD_BRUTE = 0,
  ALG2D_AUT_METHOD_CLOSED = 1,
  ALG2D_AUT_METHOD_BOTH = 2,
} Alg2dAutMethod;

typedef enum Alg2dStatus {
  ALG2D_STATUS_OK = 0,
  ALG2D_STATUS_NULL_POINTER = 1,
  ALG2D_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed field spec, MSC, family name or option.
   */
  ALG2D_STATUS_USAGE = 3,
  /**
   * The computation failed or is out of scope.
   */
  ALG2D_STATUS_COMPUTE = 4,
  ALG2D_STATUS_PANIC = 5,
} Alg2dStatus;

/**
 * A validated field specification.
 */
typedef struct Alg2dField Alg2dField;

/**
 * Structure constants over a field.
 */
typedef struct Alg2dMsc Alg2dMsc;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *alg2d_last_error(void);

/**
 * Releases a string returned through an out-pointer. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void alg2d_string_free(char *s);

/**
 * Parses a field spec such as "q:7", "q:9" or "rational".
 *
 * # Safety
 * `spec` must be a nul-terminated string and `out` a valid pointer.
 */
enum Alg2dStatus alg2d_field_new(const char *spec, struct Alg2dField **out);

/**
 * # Safety
 * `field` must come from [`alg2d_field_new`] and not have been freed.
 */
void alg2d_field_free(struct Alg2dField *field);

/**
 * Field order, or 0 for the rationals.
 *
 * # Safety
 * `field` must be a live handle or null.
 */
uint64_t alg2d_field_order(const struct Alg2dField *field);

/**
 * Parses "a1,a2,a3,a4;b1,b2,b3,b4" over `field`.
 *
 * # Safety
 * `field` must be a live handle, `text` nul-terminated, `out` valid.
 */
enum Alg2dStatus alg2d_msc_parse(const struct Alg2dField *field,
                                 const char *text,
                                 struct Alg2dMsc **out);

/**
 * # Safety
 * `msc` must come from [`alg2d_msc_parse`] and not have been freed.
 */
void alg2d_msc_free(struct Alg2dMsc *msc);

/**
 * Canonical text of an MSC.
 *
 * # Safety
 * `msc` must be a live handle and `out` valid.
 */
enum Alg2dStatus alg2d_msc_render(const struct Alg2dMsc *msc, char **out);

/**
 * Derivation algebra as JSON `{dimension, basis, source, ...}`.
 *
 * # Safety
 * `msc` must be a live handle and `out` valid.
 */
enum Alg2dStatus alg2d_der(const struct Alg2dMsc *msc, char **out);

/**
 * Exhaustive automorphism group as JSON `{order, elements, filter_used, ...}`.
 *
 * # Safety
 * `msc` must be a live handle and `out` valid.
 */
enum Alg2dStatus alg2d_aut(const struct Alg2dMsc *msc, char **out);

/**
 * Derivations of a canonical family ("A3@c=1,0,2") from the closed form.
 * A nonzero `verbatim_a10` reads the A10 third-family entry as printed.
 *
 * # Safety
 * `field` must be a live handle, `family` nul-terminated, `out` valid.
 */
enum Alg2dStatus alg2d_family_der(const struct Alg2dField *field,
                                  const char *family,
                                  int32_t verbatim_a10,
                                  char **out);

/**
 * Automorphisms of a canonical family. With [`Alg2dAutMethod::Both`] the
 * JSON carries `agree`.
 *
 * # Safety
 * `field` must be a live handle, `family` nul-terminated, `out` valid.
 */
enum Alg2dStatus alg2d_family_aut(const struct Alg2dField *field,
                                  const char *family,
                                  enum Alg2dAutMethod method,
                                  int32_t verbatim_a10,
                                  char **out);

/**
 * Isomorphism test; JSON `{isomorphic, witness}`.
 *
 * # Safety
 * Both handles must be live and `out` valid.
 */
enum Alg2dStatus alg2d_iso(const struct Alg2dMsc *a, const struct Alg2dMsc *b, char **out);

/**
 * Canonical class; JSON `{class, family, witness, ...}`.
 *
 * # Safety
 * `msc` must be a live handle and `out` valid.
 */
enum Alg2dStatus alg2d_classify(const struct Alg2dMsc *msc, char **out);

/**
 * Table verification report as JSON. `fields` may be null for the
 * regime's default fields.
 *
 * # Safety
 * `regime` must be nul-terminated, `fields` nul-terminated or null, `out` valid.
 */
enum Alg2dStatus alg2d_verify_table(const char *regime,
                                    const char *fields,
                                    uint32_t budget,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALG2D_H */
