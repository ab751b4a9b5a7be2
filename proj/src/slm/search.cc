#include "slm/search.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "slm/error.h"

namespace slm {

bool BetterHypothesis(const WordParsePrefix& a, const WordParsePrefix& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.derivation < b.derivation;
}

void PruneStack(std::vector<WordParsePrefix>* stack, const BeamOptions& options) {
  if (stack->empty()) return;
  std::sort(stack->begin(), stack->end(), BetterHypothesis);
  const double floor = stack->front().logprob - options.log_width;
  size_t keep = 0;
  while (keep < stack->size() && (*stack)[keep].logprob >= floor) ++keep;
  if (options.max_entries > 0) keep = std::min<size_t>(keep, options.max_entries);
  stack->resize(std::max<size_t>(keep, 1));
}

StackSet::StackSet(const StructuredLm& model, const BeamOptions& options)
    : model_(model), options_(options) {
  hypotheses_.push_back(WordParsePrefix::Initial(model.vocab()));
}

std::vector<double> StackSet::Posteriors() const {
  if (hypotheses_.empty()) throw Error(ErrorCode::kSearchFailure, "empty stack set");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& h : hypotheses_) best = std::max(best, h.logprob);
  std::vector<double> rho(hypotheses_.size());
  double total = 0.0;
  for (size_t i = 0; i < hypotheses_.size(); ++i) {
    rho[i] = std::exp(hypotheses_[i].logprob - best);
    total += rho[i];
  }
  for (double& r : rho) r /= total;
  return rho;
}

double StackSet::LmProb(WordId next) const {
  const std::vector<double> rho = Posteriors();
  double p = 0.0;
  for (size_t i = 0; i < hypotheses_.size(); ++i)
    p += rho[i] * model_.WordProb(hypotheses_[i], next);
  return p;
}

void StackSet::Advance(WordId next) {
  if (finished_) throw Error(ErrorCode::kInvalidArgument, "advance after </s>");
  if (next <= Vocabulary::kBos || next >= model_.vocab().num_words())
    throw Error(ErrorCode::kInvalidArgument, "word id out of range");
  const Vocabulary& vocab = model_.vocab();

  std::vector<WordParsePrefix> open;
  std::vector<double> tag_probs(vocab.num_tags());
  for (const auto& h : hypotheses_) {
    const double pw = model_.WordProb(h, next);
    if (!(pw > 0.0)) continue;
    model_.TagDistribution(h, next, tag_probs);
    const double base = h.logprob + std::log(pw);
    for (CategoryId t = 0; t < vocab.num_tags(); ++t) {
      if (!(tag_probs[t] > 0.0)) continue;
      WordParsePrefix shifted = ShiftWord(h, next, t);
      shifted.logprob = base + std::log(tag_probs[t]);
      open.push_back(std::move(shifted));
    }
  }

  std::vector<WordParsePrefix> closed_all;
  int stacks = 0;
  while (!open.empty()) {
    PruneStack(&open, options_);
    ++stacks;
    std::vector<WordParsePrefix> closed;
    std::vector<WordParsePrefix> deeper;
    for (const auto& h : open) {
      const auto legal = LegalActions(h, vocab, model_.mode());
      const auto probs = model_.LegalActionProbs(h, legal);
      for (size_t i = 0; i < legal.size(); ++i) {
        if (!(probs[i] > 0.0)) continue;
        WordParsePrefix child = ApplyAction(h, legal[i], vocab, model_.mode());
        child.logprob = h.logprob + std::log(probs[i]);
        (legal[i].is_null() ? closed : deeper).push_back(std::move(child));
      }
    }
    PruneStack(&closed, options_);
    for (auto& c : closed) closed_all.push_back(std::move(c));
    open = std::move(deeper);
  }
  last_stack_count_ = stacks;
  if (closed_all.empty())
    throw Error(ErrorCode::kSearchFailure,
                "no hypothesis survived at position " + std::to_string(position_ + 1));
  hypotheses_ = std::move(closed_all);
  ++position_;
  if (next == Vocabulary::kEos) finished_ = true;
}

SentenceSearch SearchSentence(const StructuredLm& model, const std::vector<WordId>& words,
                              const BeamOptions& options) {
  SentenceSearch result;
  StackSet stacks(model, options);
  result.word_probs.reserve(words.size() + 1);
  for (size_t k = 0; k <= words.size(); ++k) {
    const WordId w = k < words.size() ? words[k] : Vocabulary::kEos;
    result.word_probs.push_back(stacks.LmProb(w));
    stacks.Advance(w);
  }
  result.complete = stacks.hypotheses();
  std::sort(result.complete.begin(), result.complete.end(), BetterHypothesis);
  return result;
}

BestParseResult BestParse(const StructuredLm& model, const std::vector<WordId>& words,
                          const BeamOptions& options) {
  SentenceSearch search = SearchSentence(model, words, options);
  const WordParsePrefix& best = search.complete.front();
  return {best.fragments.back(), best.logprob, best.derivation};
}

}  // namespace slm
