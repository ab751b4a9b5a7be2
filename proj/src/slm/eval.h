#ifndef SLM_EVAL_H_
#define SLM_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "slm/text.h"
#include "slm/vocabulary.h"

namespace slm {

struct PerplexityResult {
  double perplexity = 0.0;
  double log_prob = 0.0;  // natural log
  size_t tokens = 0;      // predicted tokens, </s> included
};

// probs[i] holds P(w_k | history) for every word of sentence i and </s>.
// A zero probability throws Error(kZeroProbability) naming the token; word
// strings are included when `sentences` and `vocab` are given.
PerplexityResult PerplexityFromProbs(const std::vector<std::vector<double>>& probs,
                                     const std::vector<IndexedSentence>* sentences = nullptr,
                                     const Vocabulary* vocab = nullptr);

using SentenceScorer = std::function<std::vector<double>(const IndexedSentence&)>;

PerplexityResult Perplexity(const SentenceScorer& lm,
                            const std::vector<IndexedSentence>& sentences,
                            const Vocabulary* vocab = nullptr, int threads = 1);

struct NBestHypothesis {
  Sentence words;
  double acoustic = 0.0;
  double lm = 0.0;
  int rank = 0;  // 1 = decoder best
};

struct NBestList {
  std::string id;
  Sentence reference;
  std::vector<NBestHypothesis> hypotheses;
};

// Blocks of "UTT <id> REF <words...>" followed by "<acoustic> <lm> <words...>"
// lines, separated by blank lines.
std::vector<NBestList> ReadNBest(std::istream& in);
std::vector<NBestList> ReadNBestFile(const std::string& path);
void WriteNBest(std::ostream& out, const std::vector<NBestList>& lists);

struct RescoreWeights {
  double acoustic_scale = 1.0;
  double lm_scale = 1.0;
  double word_insertion_penalty = 0.0;
};

// Index of the hypothesis maximizing
// acoustic_scale * acoustic + lm_scale * lm_log_probs[i] + wip * length;
// ties go to the lower original rank.
size_t Rescore(const NBestList& list, const std::vector<double>& lm_log_probs,
               const RescoreWeights& weights);

struct EditCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t reference_words = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
  double rate() const;
  EditCounts& operator+=(const EditCounts& other);
  bool operator==(const EditCounts&) const = default;
};

// Minimum edit distance alignment with unit costs. Among optimal
// alignments the backtrace prefers substitution, then deletion, then
// insertion.
EditCounts Align(const Sentence& hypothesis, const Sentence& reference);

// Scores every selection against the reference with the same utterance id;
// a selection without a reference throws Error(kMissingReference).
EditCounts ComputeWer(const std::map<std::string, Sentence>& hypotheses,
                      const std::map<std::string, Sentence>& references);

// Per utterance, the hypothesis with the fewest errors against its
// reference (the list's own REF unless `references` is given).
EditCounts OracleWer(const std::vector<NBestList>& lists,
                     const std::map<std::string, Sentence>* references = nullptr);

// "<id> <words...>" per line.
std::map<std::string, Sentence> ReadTranscripts(std::istream& in);
std::map<std::string, Sentence> ReadTranscriptFile(const std::string& path);
void WriteTranscripts(std::ostream& out, const std::map<std::string, Sentence>& transcripts);

}  // namespace slm

#endif  // SLM_EVAL_H_
