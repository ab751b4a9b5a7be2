#ifndef SLM_ESTIMATION_H_
#define SLM_ESTIMATION_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slm/component_model.h"
#include "slm/parse_state.h"
#include "slm/slm_model.h"
#include "slm/text.h"
#include "slm/treebank.h"

namespace slm {

// Derivation of a complete binarized parse of w_1..w_n: each word is
// shifted, every adjoin is emitted as soon as both of its children are
// complete, and each position closes with null. The sentence is finished by
// shifting </s> (tag "SE") and adjoining it under "TOP".
ParseDerivation TreeToDerivation(const ParseNode& tree, const Vocabulary& vocab);

// The single derivation allowed in ParserMode::kNullOnly.
ParseDerivation NullOnlyDerivation(const std::vector<WordId>& words,
                                   const std::vector<CategoryId>& tags,
                                   const Vocabulary& vocab);

// Sentence-level 90/10 main/check split. Exactly round(n/10) sentences
// (at least one when n >= 2) go to check, chosen by a seeded hash of the
// sentence index. true = check.
std::vector<bool> CheckMembership(size_t num_sentences, uint64_t seed);

// Per-component event counts split into main and check portions.
struct CountSplit {
  std::array<EventCounts, kNumComponents> main;
  std::array<EventCounts, kNumComponents> check;
  uint64_t seed = 0;

  EventCounts& part(Component c, bool is_check) {
    return is_check ? check[static_cast<int>(c)] : main[static_cast<int>(c)];
  }
  void Merge(const CountSplit& other);
};

// Adds every event of `derivation` with the given weight.
void AddDerivationEvents(const ParseDerivation& derivation, double weight, bool is_check,
                         const Vocabulary& vocab, ParserMode mode, CountSplit* counts);

CountSplit GatherCounts(const std::vector<ParseDerivation>& derivations,
                        const std::vector<bool>& check_membership, const Vocabulary& vocab,
                        ParserMode mode);

struct WeightEstimationOptions {
  int max_iterations = 100;
  double min_improvement = 1e-7;  // absolute change in check log-likelihood
};

struct WeightEstimate {
  std::map<BucketId, std::vector<double>> weights;
  // Check-data log-likelihood before each update, plus the final value.
  std::vector<double> log_likelihood;
};

// EM over the interpolation weights of `main_model` (counts from main data)
// maximizing the likelihood of the check events, separately per bucket.
WeightEstimate EstimateWeights(const ComponentModel& main_model, const EventCounts& check,
                               const WeightEstimationOptions& options = {});

// Drops back-off levels whose context never varies across `events`: they
// carry nothing beyond the coarsest constant level, which is kept.
ContextSchema ActiveSchema(const ContextSchema& schema, const EventCounts& events);

struct ComponentEstimate {
  ComponentModel model;
  std::vector<double> weight_log_likelihood;
};

// Relative frequencies from main, weights from check; the final tables pool
// main and check when `pool_check` is set.
ComponentEstimate EstimateComponent(const ContextSchema& canonical, int32_t num_outcomes,
                                    const EventCounts& main, const EventCounts& check,
                                    bool pool_check,
                                    const WeightEstimationOptions& options = {});

// Fills all three components of `model` from `counts`.
void EstimateModel(const CountSplit& counts, StructuredLm* model,
                   const WeightEstimationOptions& options = {});

struct InitOptions {
  uint64_t split_seed = 1;
  ParserMode mode = ParserMode::kFull;
  bool pool_check = true;
  bool collapse_tags = false;
  bool collapse_labels = false;
  std::string source = "treebank";
  const HeadRules* head_rules = nullptr;  // default table when null
};

// Adds the tags and labels used by `trees` (plus SB/SE and TOP) to `vocab`.
void AddCategories(const std::vector<BinarizedTree>& trees, Vocabulary* vocab);

// Bracketed trees -> cleanup -> head percolation -> binarization.
std::vector<BinarizedTree> PrepareTrees(const std::vector<BracketedTree>& trees,
                                        const HeadRules& rules);

// Builds a model from parsed sentences. The word vocabulary is fixed by
// `words`; out-of-vocabulary treebank words map to <unk>.
StructuredLm InitializeModel(const std::vector<BracketedTree>& trees, const Vocabulary& words,
                             const InitOptions& options);

}  // namespace slm

#endif  // SLM_ESTIMATION_H_
