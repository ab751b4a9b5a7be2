#include "slm/em.h"

#include <cmath>
#include <iomanip>
#include <limits>

#include "slm/error.h"
#include "slm/parallel.h"
#include "slm/text_io.h"

namespace slm {
namespace {

struct SentenceResult {
  CountSplit counts;
  double log_likelihood = 0.0;
  double lm_log_prob = 0.0;
  size_t tokens = 0;
  bool skipped = false;
  std::vector<ParseDerivation> support;
};

double LogSumExp(const std::vector<double>& values) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : values) best = std::max(best, v);
  if (!std::isfinite(best)) return best;
  double total = 0.0;
  for (double v : values) total += std::exp(v - best);
  return best + std::log(total);
}

void Accumulate(const StructuredLm& model, const std::vector<ParseDerivation>& derivations,
                const std::vector<double>& logprobs, bool is_check, SentenceResult* out) {
  const double norm = LogSumExp(logprobs);
  if (!std::isfinite(norm))
    throw Error(ErrorCode::kZeroProbability, "support has zero probability");
  out->log_likelihood = norm;
  for (size_t i = 0; i < derivations.size(); ++i) {
    AddDerivationEvents(derivations[i], std::exp(logprobs[i] - norm), is_check, model.vocab(),
                        model.mode(), &out->counts);
  }
}

EStepResult Collect(std::vector<SentenceResult>& results, uint64_t seed) {
  EStepResult out;
  out.counts.seed = seed;
  out.support.reserve(results.size());
  for (auto& r : results) {
    if (r.skipped) {
      ++out.skipped;
    } else {
      out.counts.Merge(r.counts);
      out.log_likelihood += r.log_likelihood;
      out.lm_log_prob += r.lm_log_prob;
      out.predicted_tokens += r.tokens;
    }
    out.support.push_back(std::move(r.support));
  }
  return out;
}

}  // namespace

double EStepResult::perplexity() const {
  if (predicted_tokens == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(-lm_log_prob / static_cast<double>(predicted_tokens));
}

EStepResult EStep(const StructuredLm& model, const std::vector<IndexedSentence>& sentences,
                  const EmOptions& options) {
  if (options.nbest < 1) throw Error(ErrorCode::kInvalidArgument, "nbest must be positive");
  const std::vector<bool> check = CheckMembership(sentences.size(), model.split_seed);
  std::vector<SentenceResult> results(sentences.size());
  ParallelFor(sentences.size(), options.threads, [&](size_t i) {
    SentenceResult& r = results[i];
    try {
      SentenceSearch search = SearchSentence(model, sentences[i], options.beam);
      const size_t keep = std::min<size_t>(search.complete.size(), options.nbest);
      std::vector<double> logprobs;
      for (size_t j = 0; j < keep; ++j) {
        r.support.push_back(std::move(search.complete[j].derivation));
        logprobs.push_back(search.complete[j].logprob);
      }
      Accumulate(model, r.support, logprobs, check[i], &r);
      for (double p : search.word_probs) r.lm_log_prob += std::log(p);
      r.tokens = search.word_probs.size();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSearchFailure && e.code() != ErrorCode::kZeroProbability)
        throw;
      Warn("sentence " + std::to_string(i + 1) + " skipped: " + e.what());
      r = SentenceResult();
      r.skipped = true;
    }
  });
  return Collect(results, model.split_seed);
}

EStepResult FrozenEStep(const StructuredLm& model, const std::vector<IndexedSentence>& sentences,
                        const std::vector<std::vector<ParseDerivation>>& support,
                        const EmOptions& options) {
  if (support.size() != sentences.size())
    throw Error(ErrorCode::kInvalidArgument, "support does not match the sentences");
  const std::vector<bool> check = CheckMembership(sentences.size(), model.split_seed);
  std::vector<SentenceResult> results(sentences.size());
  ParallelFor(sentences.size(), options.threads, [&](size_t i) {
    SentenceResult& r = results[i];
    if (support[i].empty()) {
      r.skipped = true;
      return;
    }
    r.support = support[i];
    std::vector<double> logprobs;
    for (const auto& d : r.support) logprobs.push_back(model.JointLogProb(sentences[i], d));
    Accumulate(model, r.support, logprobs, check[i], &r);
  });
  return Collect(results, model.split_seed);
}

StructuredLm MStep(const StructuredLm& model, const CountSplit& counts,
                   const WeightEstimationOptions& options) {
  StructuredLm next = model;
  EstimateModel(counts, &next, options);
  next.iteration = model.iteration + 1;
  return next;
}

StructuredLm Train(const StructuredLm& initial, const std::vector<IndexedSentence>& sentences,
                   const TrainOptions& options, std::vector<IterationRecord>* trace) {
  if (options.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "negative iteration count");
  StructuredLm model = initial;
  for (int it = 0;; ++it) {
    EStepResult e = EStep(model, sentences, options.em);
    if (options.observer) options.observer(model, e);
    IterationRecord record;
    record.iteration = model.iteration;
    record.train_ppl = e.perplexity();
    record.log_likelihood = e.log_likelihood;
    record.next_support_log_likelihood = std::numeric_limits<double>::quiet_NaN();
    record.skipped = e.skipped;
    for (int c = 0; c < kNumComponents; ++c)
      record.parameters[c] = CountParameters(model.component(static_cast<Component>(c)));
    if (it == options.iterations) {
      if (trace) trace->push_back(record);
      break;
    }
    StructuredLm next = MStep(model, e.counts, options.em.weights);
    record.next_support_log_likelihood =
        FrozenEStep(next, sentences, e.support, options.em).log_likelihood;
    if (trace) trace->push_back(record);
    model = std::move(next);
  }
  return model;
}

void WriteTrace(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << "iteration\ttrain_ppl\tlog_likelihood\tnext_support_log_likelihood\tpredictor_params"
         "\ttagger_params\tparser_params\tskipped\n";
  for (const auto& r : trace) {
    out << r.iteration << '\t' << FormatDouble(r.train_ppl) << '\t'
        << FormatDouble(r.log_likelihood) << '\t'
        << (std::isnan(r.next_support_log_likelihood) ? std::string("-")
                                                       : FormatDouble(r.next_support_log_likelihood))
        << '\t' << r.parameters[0] << '\t' << r.parameters[1] << '\t' << r.parameters[2] << '\t'
        << r.skipped << '\n';
  }
}

}  // namespace slm
