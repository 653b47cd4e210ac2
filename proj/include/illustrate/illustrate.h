#ifndef ILLUSTRATE_H
#define ILLUSTRATE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef ILLUSTRATE_BUILDING_LIBRARY
#    define ILL_API __declspec(dllexport)
#  else
#    define ILL_API __declspec(dllimport)
#  endif
#else
#  define ILL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum ill_status {
  ILL_OK = 0,
  ILL_ERR_USAGE = 1,
  ILL_ERR_DATA = 2,     /* io, parse, dimension, lookup */
  ILL_ERR_NUMERIC = 3,  /* numeric, integrity, allocation, size */
  ILL_ERR_INTERNAL = 4
} ill_status;

typedef struct ill_corpus ill_corpus;
typedef struct ill_simmatrix ill_simmatrix;

/* Message of the last failure on the calling thread; empty after success. */
ILL_API const char* ill_last_error(void);
/* Error kind name ("parse", "lookup", ...) of the last failure. */
ILL_API const char* ill_last_error_kind(void);

ILL_API const char* ill_version(void);

/* Strings returned through `char** out` are owned by the caller. */
ILL_API void ill_string_free(char* s);

ILL_API ill_status ill_corpus_load(const char* path, ill_corpus** out);
ILL_API ill_status ill_corpus_parse(const char* json_text, ill_corpus** out);
ILL_API void ill_corpus_free(ill_corpus* corpus);
ILL_API ill_status ill_corpus_counts(const ill_corpus* corpus, size_t* sections,
                                     size_t* subsections, size_t* images);
ILL_API ill_status ill_corpus_summary(const ill_corpus* corpus, char** out_json);
/* Phrase table for the window settings in `config_json` (may be NULL). */
ILL_API ill_status ill_corpus_phrases(const ill_corpus* corpus, const char* config_json,
                                      char** out_json);

ILL_API ill_status ill_sim_load(const char* path, ill_simmatrix** out);
/* `format` is "binary" or "text". */
ILL_API ill_status ill_sim_save(const ill_simmatrix* sim, const char* path, const char* format);
ILL_API ill_status ill_sim_shape(const ill_simmatrix* sim, size_t* n_phrases, size_t* n_images);
ILL_API ill_status ill_sim_prob(const ill_simmatrix* sim, const char* image_id,
                                const char* phrase_id, double* out);
/* Throws a dimension error unless the columns equal the bank ids in order. */
ILL_API ill_status ill_sim_check_bank(const ill_simmatrix* sim, const char* bank_path);
ILL_API void ill_sim_free(ill_simmatrix* sim);

/* Run documents. `config_json` is a JSON object of run settings (may be NULL);
 * the result is the JSON report text, ending in a newline. */
ILL_API ill_status ill_ingest(const ill_corpus* corpus, const char* config_json, char** out_json);
ILL_API ill_status ill_analyze(const ill_corpus* corpus, const ill_simmatrix* sim,
                               const char* config_json, char** out_json);
ILL_API ill_status ill_assign(const ill_corpus* corpus, const ill_simmatrix* sim,
                              const char* config_json, char** out_json);
ILL_API ill_status ill_evaluate(const ill_corpus* corpus, const ill_simmatrix* sim,
                                const char* config_json, char** out_json);
ILL_API ill_status ill_oracle(const char* config_json, char** out_json);

/* Validates a configuration and returns its normalized full form. */
ILL_API ill_status ill_config_normalize(const char* config_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
