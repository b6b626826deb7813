#ifndef TEAMLOGIC_H
#define TEAMLOGIC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success; everything else has a message in
 * [`tl_last_error`].
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_UTF8 = 2,
  TL_STATUS_SYNTAX = 3,
  TL_STATUS_UNKNOWN_SYMBOL = 4,
  TL_STATUS_UNKNOWN_QUANTIFIER = 5,
  TL_STATUS_ARITY = 6,
  TL_STATUS_DIALECT = 7,
  TL_STATUS_UNBOUND_VARIABLE = 8,
  TL_STATUS_CAP_EXCEEDED = 9,
  TL_STATUS_NOT_MONOTONE = 10,
  TL_STATUS_PRECONDITION = 11,
  TL_STATUS_FORMAT = 12,
  TL_STATUS_IO = 13,
  TL_STATUS_PANIC = 14,
} TlStatus;

/**
 * Fragment a formula is parsed in.
 */
typedef enum TlDialect {
  TL_DIALECT_DQ = 0,
  TL_DIALECT_IQ = 1,
  TL_DIALECT_FO = 2,
  TL_DIALECT_ESO = 3,
} TlDialect;

/**
 * Translation targets for [`tl_translate`].
 */
typedef enum TlTarget {
  /**
   * Skolem normal form.
   */
  TL_TARGET_NORMAL_FORM = 0,
  /**
   * A D(Q) sentence, through normal form and flattening.
   */
  TL_TARGET_DQ = 1,
} TlTarget;

/**
 * A parsed formula.
 */
typedef struct TlFormula TlFormula;

/**
 * Quantifier registry, starting with the builtins.
 */
typedef struct TlRegistry TlRegistry;

/**
 * A finite structure.
 */
typedef struct TlStructure TlStructure;

/**
 * A team.
 */
typedef struct TlTeam TlTeam;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent call on this thread if it failed, otherwise
 * null. Valid until the next call on the same thread; do not free.
 */
const char *tl_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed, or be null.
 */
void tl_string_free(char *s);

/**
 * A registry holding the builtin quantifiers. Never null.
 */
struct TlRegistry *tl_registry_new(void);

/**
 * Registers an extensional quantifier given in the `quant name/k` format.
 *
 * # Safety
 * `reg` must be a live registry and `text` a nul-terminated string.
 */
enum TlStatus tl_registry_load(struct TlRegistry *reg, const char *text);

/**
 * # Safety
 * `reg` must come from [`tl_registry_new`] and not have been freed, or be null.
 */
void tl_registry_free(struct TlRegistry *reg);

/**
 * Parses a structure file.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum TlStatus tl_structure_parse(const char *text, struct TlStructure **out);

/**
 * Number of elements.
 *
 * # Safety
 * `m` must be a live structure.
 */
size_t tl_structure_size(const struct TlStructure *m);

/**
 * # Safety
 * `m` must come from [`tl_structure_parse`] and not have been freed, or be null.
 */
void tl_structure_free(struct TlStructure *m);

/**
 * Parses a team file.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum TlStatus tl_team_parse(const char *text, struct TlTeam **out);

/**
 * Number of assignments.
 *
 * # Safety
 * `x` must be a live team.
 */
size_t tl_team_len(const struct TlTeam *x);

/**
 * # Safety
 * `x` must come from [`tl_team_parse`] and not have been freed, or be null.
 */
void tl_team_free(struct TlTeam *x);

/**
 * Parses a formula. With a structure, symbols are checked against its
 * signature; with null, arities are inferred from use.
 *
 * # Safety
 * `text` must be a nul-terminated string, `m` null or a live structure,
 * `reg` a live registry, and `out` writable.
 */
enum TlStatus tl_formula_parse(const char *text,
                               enum TlDialect dialect,
                               const struct TlStructure *m,
                               const struct TlRegistry *reg,
                               struct TlFormula **out);

/**
 * The formula in concrete syntax; free with [`tl_string_free`].
 *
 * # Safety
 * `phi` must be a live formula.
 */
char *tl_formula_to_string(const struct TlFormula *phi);

/**
 * # Safety
 * `phi` must come from [`tl_formula_parse`] and not have been freed, or be null.
 */
void tl_formula_free(struct TlFormula *phi);

/**
 * `M, X ⊨ φ` under the default semantics.
 *
 * # Safety
 * All handles must be live and `out` writable.
 */
enum TlStatus tl_eval_team(const struct TlStructure *m,
                           const struct TlTeam *x,
                           const struct TlFormula *phi,
                           const struct TlRegistry *reg,
                           bool *out);

/**
 * Truth of a sentence of any dialect.
 *
 * # Safety
 * All handles must be live and `out` writable.
 */
enum TlStatus tl_eval_sentence(const struct TlStructure *m,
                               const struct TlFormula *phi,
                               const struct TlRegistry *reg,
                               bool *out);

/**
 * Translates an ESO(Q) sentence; the result is a string to free with
 * [`tl_string_free`].
 *
 * # Safety
 * `phi` must be a live formula and `out` writable.
 */
enum TlStatus tl_translate(const struct TlFormula *phi, enum TlTarget target, char **out);

/**
 * Compares two sentences on every structure over `signature` (e.g.
 * `"P/1,E/2"`) with the given universe sizes. `out` is true when they agree
 * everywhere.
 *
 * # Safety
 * Strings must be nul-terminated, `sizes` must point to `n_sizes`
 * elements, `reg` must be live and `out` writable.
 */
enum TlStatus tl_check_equiv(const char *lhs,
                             const char *rhs,
                             const char *signature,
                             const size_t *sizes,
                             size_t n_sizes,
                             const struct TlRegistry *reg,
                             bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEAMLOGIC_H */
