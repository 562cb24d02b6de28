#ifndef SCC_CAPI_H
#define SCC_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef struct SccPopulation SccPopulation;
typedef struct SccCounts SccCounts;

/**
 * Result of a C API call.
 */
typedef enum SccStatus {
  SccStatus_Ok = 0,
  /**
   * A pointer was null, a string was not UTF-8, or a literal
   * specification did not parse.
   */
  SccStatus_InvalidArgument = 1,
  /**
   * The input data was malformed or insufficient for the request.
   */
  SccStatus_DataError = 2,
  /**
   * An internal invariant failed; report this as a bug.
   */
  SccStatus_InternalError = 3,
} SccStatus;

/**
 * Study design of a counts file.
 */
typedef enum SccDesign {
  SccDesign_Cohort = 0,
  SccDesign_CaseControl = 1,
} SccDesign;

/**
 * Which empirical contrast family to evaluate.
 */
typedef enum SccContrastKind {
  SccContrastKind_Irreducibility = 0,
  SccContrastKind_Singularity = 1,
  SccContrastKind_MinimalSufficientCause = 2,
} SccContrastKind;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *scc_version(void);

/**
 * Message for the most recent failure on this thread, or an empty
 * string. The pointer is valid until the next API call on this thread.
 */
const char *scc_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be a string previously returned through an out-parameter of
 * this library, or null.
 */
void scc_string_free(char *s);

/**
 * Parses a truth-table CSV (`id,weight,D000,...`) into a population
 * handle. With `probability_weights` true, weights must sum to 1.
 *
 * # Safety
 * `csv` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum SccStatus scc_population_parse(const char *csv, bool probability_weights, SccPopulation **out);

/**
 * Releases a population handle.
 *
 * # Safety
 * `p` must come from [`scc_population_parse`], or be null.
 */
void scc_population_free(SccPopulation *p);

/**
 * Number of individuals, or -1 on a null handle.
 *
 * # Safety
 * `p` must be a valid handle or null.
 */
int64_t scc_population_size(const SccPopulation *p);

/**
 * Number of binary causes, or -1 on a null handle.
 *
 * # Safety
 * `p` must be a valid handle or null.
 */
int64_t scc_population_causes(const SccPopulation *p);

/**
 * Per-individual minimal sufficient causes (prime implicants) and
 * essential prime implicants, as a JSON array.
 *
 * # Safety
 * `p` must be a valid handle; `out` a valid pointer.
 */
enum SccStatus scc_implicants_json(const SccPopulation *p, char **out);

/**
 * Irreducibility query: JSON finding with the witness when one exists.
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_population_parse`].
 */
enum SccStatus scc_irreducible_json(const SccPopulation *p, const char *b, char **out);

/**
 * Singularity query: JSON finding with the witness when one exists.
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_population_parse`].
 */
enum SccStatus scc_singular_json(const SccPopulation *p, const char *b, char **out);

/**
 * Probability of necessity and sufficiency of a full-width conjunction.
 * Requires a probability-mode population.
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_population_parse`].
 */
enum SccStatus scc_pns(const SccPopulation *p, const char *b, double *out);

/**
 * Canonical sufficient-cause representation as JSON
 * (`{"conjuncts": [...], "membership": [...]}`).
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_population_parse`].
 */
enum SccStatus scc_canonical_representation_json(const SccPopulation *p, char **out);

/**
 * Representation avoiding `b`, as
 * `{"constructible": bool, "export": {...}?}`; not constructible exactly
 * when `b` is irreducible.
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_population_parse`].
 */
enum SccStatus scc_avoidance_representation_json(const SccPopulation *p, const char *b, char **out);

/**
 * Parses a stratified counts CSV. `exposures` is a comma-separated list
 * of exposure column names; `strata` likewise or null for none.
 *
 * # Safety
 * Strings must be valid NUL-terminated strings; `out` a valid pointer.
 */
enum SccStatus scc_counts_parse(const char *csv,
                                enum SccDesign design,
                                const char *exposures,
                                const char *strata,
                                SccCounts **out);

/**
 * Releases a counts handle.
 *
 * # Safety
 * `c` must come from [`scc_counts_parse`], or be null.
 */
void scc_counts_free(SccCounts *c);

/**
 * Evaluates one contrast family for every spanning tree on `bplus` and
 * returns a JSON array of results (estimate, standard error, interval,
 * one-sided p-value, assumptions).
 *
 * Literals in `b`/`bplus` may use exposure names or X-numbers. `bplus`
 * may be null for the no-monotonicity form; `stratum` null means the
 * unstratified label `*`; a negative `continuity` disables the
 * zero-cell correction.
 *
 * # Safety
 * Pointers must be valid as documented on [`scc_counts_parse`].
 */
enum SccStatus scc_contrast_json(const SccCounts *c,
                                 const char *b,
                                 const char *bplus,
                                 enum SccContrastKind kind,
                                 const char *stratum,
                                 double continuity,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCC_CAPI_H */
