/* C interface to the structured language model toolkit. All handles are
 * opaque; every call returns a status code and, on failure, leaves a
 * message retrievable with slm_last_error() on the calling thread. */
#ifndef SLM_SLM_H_
#define SLM_SLM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SLM_API __declspec(dllexport)
#else
#define SLM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slm_status {
  SLM_OK = 0,
  SLM_ERR_IO = 1,
  SLM_ERR_FORMAT = 2,
  SLM_ERR_VOCABULARY_MISMATCH = 3,
  SLM_ERR_INVALID_ARGUMENT = 4,
  SLM_ERR_SEARCH_FAILURE = 5,
  SLM_ERR_INVALID_DERIVATION = 6,
  SLM_ERR_ILLEGAL_ACTION = 7,
  SLM_ERR_ZERO_PROBABILITY = 8,
  SLM_ERR_MISSING_REFERENCE = 9,
  SLM_ERR_INTERNAL = 10
} slm_status;

typedef struct slm_model slm_model;
typedef struct slm_trigram slm_trigram;
typedef struct slm_eval slm_eval;
typedef struct slm_nbest slm_nbest;
typedef struct slm_nbest_scores slm_nbest_scores;

SLM_API const char* slm_status_name(slm_status status);
/* Message of the last failed call on this thread; "" if none. */
SLM_API const char* slm_last_error(void);
SLM_API void slm_set_warnings(int enabled);

typedef struct slm_beam {
  int max_entries;   /* per stack; 0 = unbounded */
  double log_width;  /* natural-log beam; <= 0 or infinite = unbounded */
} slm_beam;
SLM_API slm_beam slm_beam_default(void);

/* ---- models ---- */

typedef struct slm_init_options {
  uint64_t split_seed;
  int null_only;        /* parser forced to null, fixed completion */
  int collapse_tags;    /* single tag type */
  int collapse_labels;  /* single label type */
  int pool_check;       /* pool check counts into final tables */
  const char* source;   /* provenance name stored in the model; NULL = "treebank" */
} slm_init_options;
SLM_API slm_init_options slm_init_options_default(void);

/* Builds a model from a bracketed-parse file. `headrules_path` may be NULL
 * for the built-in table. Words outside the vocabulary file map to <unk>. */
SLM_API slm_status slm_model_init(const char* parses_path, const char* vocab_path,
                                  const char* headrules_path, const slm_init_options* options,
                                  slm_model** out);
SLM_API slm_status slm_model_load(const char* path, slm_model** out);
SLM_API slm_status slm_model_save(const slm_model* model, const char* path);
SLM_API void slm_model_free(slm_model* model);

typedef struct slm_model_info {
  int iteration;
  int null_only;
  uint64_t split_seed;
  int32_t num_words;
  int32_t num_tags;
  int32_t num_labels;
  size_t parameters[3]; /* predictor, tagger, parser */
} slm_model_info;
SLM_API slm_status slm_model_get_info(const slm_model* model, slm_model_info* out);
/* Copies the provenance name (NUL-terminated, truncated to `size`). */
SLM_API slm_status slm_model_get_source(const slm_model* model, char* buffer, size_t size);
SLM_API slm_status slm_model_set_source(slm_model* model, const char* source);
SLM_API slm_status slm_model_set_split_seed(slm_model* model, uint64_t seed);

typedef struct slm_train_options {
  int iterations;
  int nbest;
  slm_beam beam;
  int threads;
  const char* metrics_path; /* per-iteration metrics; NULL = none */
} slm_train_options;
SLM_API slm_train_options slm_train_options_default(void);

/* N-best EM on a text file (one sentence per line). `rewrite_path` (token
 * rewrite table) may be NULL. The model is replaced in place. */
SLM_API slm_status slm_model_train(slm_model* model, const char* text_path,
                                   const char* rewrite_path, const slm_train_options* options);

/* Writes the best parse of each sentence, one bracketed tree per line. */
SLM_API slm_status slm_model_parse(const slm_model* model, const char* text_path,
                                   const char* rewrite_path, slm_beam beam, int threads,
                                   const char* out_path);

/* ---- trigram ---- */

SLM_API slm_status slm_trigram_train(const char* text_path, const char* vocab_path,
                                     const char* rewrite_path, uint64_t split_seed,
                                     slm_trigram** out);
SLM_API slm_status slm_trigram_load(const char* path, slm_trigram** out);
SLM_API slm_status slm_trigram_save(const slm_trigram* trigram, const char* path);
SLM_API void slm_trigram_free(slm_trigram* trigram);

/* ---- perplexity ---- */

/* Per-word probabilities of a text under the model and/or trigram (either
 * may be NULL), computed once and mixed on demand. */
SLM_API slm_status slm_eval_create(const slm_model* model, const slm_trigram* trigram,
                                   const char* text_path, const char* rewrite_path,
                                   slm_beam beam, int threads, slm_eval** out);
SLM_API void slm_eval_free(slm_eval* eval);
/* lambda weights the trigram. */
SLM_API slm_status slm_eval_perplexity(const slm_eval* eval, double lambda, double* out);
/* Grid argmin of perplexity; ties go to the smaller lambda. */
SLM_API slm_status slm_eval_tune_lambda(const slm_eval* eval, const double* grid, size_t size,
                                        double* out);

typedef struct slm_eval_info {
  size_t sentences;
  size_t tokens; /* predicted tokens, </s> included */
  double oov_rate;
} slm_eval_info;
SLM_API slm_status slm_eval_get_info(const slm_eval* eval, slm_eval_info* out);

/* ---- n-best rescoring and WER ---- */

typedef struct slm_wer_counts {
  int64_t substitutions;
  int64_t deletions;
  int64_t insertions;
  int64_t reference_words;
  double rate;
} slm_wer_counts;

typedef struct slm_rescore_weights {
  double acoustic_scale;
  double lm_scale;
  double word_insertion_penalty;
} slm_rescore_weights;
SLM_API slm_rescore_weights slm_rescore_weights_default(void);

SLM_API slm_status slm_nbest_load(const char* path, slm_nbest** out);
SLM_API void slm_nbest_free(slm_nbest* nbest);
SLM_API size_t slm_nbest_size(const slm_nbest* nbest);
/* WER of the decoder's first hypothesis and the oracle WER. */
SLM_API slm_status slm_nbest_baseline_wer(const slm_nbest* nbest, slm_wer_counts* out);
SLM_API slm_status slm_nbest_oracle_wer(const slm_nbest* nbest, slm_wer_counts* out);

/* The scores object refers to `nbest`, which must outlive it. */
/* Language-model scores of every hypothesis. With a trigram, the mixture
 * is taken per word; without one, the file's LM scores (natural log) are
 * mixed with the model's sentence probability. `model` may be NULL when
 * only lambda = 1 will be used. */
SLM_API slm_status slm_nbest_score(const slm_nbest* nbest, const slm_model* model,
                                   const slm_trigram* trigram, const char* rewrite_path,
                                   slm_beam beam, int threads, slm_nbest_scores** out);
SLM_API void slm_nbest_scores_free(slm_nbest_scores* scores);
/* Selects one hypothesis per utterance; writes "<id> <words>" lines to
 * `selections_path` unless NULL, and returns the WER of the selection. */
SLM_API slm_status slm_nbest_rescore(const slm_nbest_scores* scores, double lambda,
                                     const slm_rescore_weights* weights,
                                     const char* selections_path, slm_wer_counts* out);

/* Scores a selection file against a reference file (both "<id> <words>"). */
SLM_API slm_status slm_wer_files(const char* hypothesis_path, const char* reference_path,
                                 slm_wer_counts* out);

#ifdef __cplusplus
}
#endif

#endif /* SLM_SLM_H_ */
