#ifndef OLFACTORY_H
#define OLFACTORY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum OlfStatus {
  OLF_STATUS_OK = 0,
  OLF_STATUS_NULL_POINTER = 1,
  OLF_STATUS_INVALID_UTF8 = 2,
  /**
   * Corpus or lexicon text could not be parsed.
   */
  OLF_STATUS_PARSE = 3,
  /**
   * Pattern syntax error; the message carries the column.
   */
  OLF_STATUS_SYNTAX = 4,
  /**
   * Pattern refers to an unknown synonym group.
   */
  OLF_STATUS_UNRESOLVED = 5,
  OLF_STATUS_INVALID_ARGUMENT = 6,
  OLF_STATUS_IO = 7,
  OLF_STATUS_PANIC = 8,
} OlfStatus;

/**
 * Landis-Koch agreement band.
 */
typedef enum OlfBand {
  OLF_BAND_POOR = 0,
  OLF_BAND_SLIGHT = 1,
  OLF_BAND_FAIR = 2,
  OLF_BAND_MODERATE = 3,
  OLF_BAND_SUBSTANTIAL = 4,
  OLF_BAND_NEAR_PERFECT = 5,
} OlfBand;

/**
 * A tagged corpus.
 */
typedef struct OlfCorpus OlfCorpus;

/**
 * Synonym groups used to resolve `<name>` references.
 */
typedef struct OlfLexicon OlfLexicon;

/**
 * A pattern compiled against a lexicon.
 */
typedef struct OlfPattern OlfPattern;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *olf_last_error(void);

/**
 * Library version as a static string.
 */
const char *olf_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void olf_string_free(char *s);

/**
 * Parses tagged corpus text (`# doc_id = ...` headers, `FORM LEMMA UPOS DEP`
 * token lines).
 *
 * # Safety
 * `name` and `tsv` must be NUL-terminated strings; `out` must be writable.
 */
enum OlfStatus olf_corpus_parse(const char *name, const char *tsv, struct OlfCorpus **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum OlfStatus olf_corpus_load(const char *path, struct OlfCorpus **out);

/**
 * # Safety
 * `corpus` must be a live handle; `out` must be writable.
 */
enum OlfStatus olf_corpus_sentence_count(const struct OlfCorpus *corpus, size_t *out);

/**
 * # Safety
 * `corpus` must come from this library; NULL is ignored.
 */
void olf_corpus_free(struct OlfCorpus *corpus);

/**
 * The bundled `smell_noun`, `smell_verb` and `smell_adj` groups.
 *
 * # Safety
 * `out` must be writable.
 */
enum OlfStatus olf_lexicon_default(struct OlfLexicon **out);

/**
 * Parses a lexicon file.
 *
 * # Safety
 * `tsv` must be a NUL-terminated string; `out` must be writable.
 */
enum OlfStatus olf_lexicon_parse(const char *tsv, struct OlfLexicon **out);

/**
 * # Safety
 * `lexicon` must come from this library; NULL is ignored.
 */
void olf_lexicon_free(struct OlfLexicon *lexicon);

/**
 * Canonical rendering of a pattern string.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable. Free
 * the result with `olf_string_free`.
 */
enum OlfStatus olf_pattern_render(const char *source, char **out);

/**
 * Parses a pattern and resolves its synonym groups.
 *
 * # Safety
 * `id` and `source` must be NUL-terminated strings, `lexicon` a live
 * handle and `out` writable. The pattern does not borrow the lexicon.
 */
enum OlfStatus olf_pattern_compile(const char *id,
                                   const char *source,
                                   const struct OlfLexicon *lexicon,
                                   struct OlfPattern **out);

/**
 * # Safety
 * `pattern` must come from this library; NULL is ignored.
 */
void olf_pattern_free(struct OlfPattern *pattern);

/**
 * Number of matches of `pattern` over the whole corpus.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum OlfStatus olf_pattern_count_matches(const struct OlfPattern *pattern,
                                         const struct OlfCorpus *corpus,
                                         size_t *out);

/**
 * Match dump as TSV, one row per match with its captures.
 *
 * # Safety
 * Handles must be live; `out` must be writable. Free the result with
 * `olf_string_free`.
 */
enum OlfStatus olf_pattern_match_tsv(const struct OlfPattern *pattern,
                                     const struct OlfCorpus *corpus,
                                     char **out);

/**
 * Cohen's kappa of two equal-length label arrays.
 *
 * # Safety
 * `a` and `b` must point to `len` readable integers; out pointers must be
 * writable. `out_band` may be NULL.
 */
enum OlfStatus olf_kappa(const int32_t *a,
                         const int32_t *b,
                         size_t len,
                         double *out_kappa,
                         enum OlfBand *out_band);

/**
 * Landis-Koch band of a kappa value.
 */
enum OlfBand olf_kappa_band(double kappa);

/**
 * Two-sided exact McNemar p-value for discordant counts `b` and `c`.
 *
 * # Safety
 * `out_p` must be writable.
 */
enum OlfStatus olf_mcnemar_exact(uint64_t b, uint64_t c, double *out_p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OLFACTORY_H */
