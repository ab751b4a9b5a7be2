#include "slm/ngram.h"

#include <cmath>

#include "slm/error.h"
#include "slm/eval.h"
#include "slm/parallel.h"
#include "slm/text_io.h"

namespace slm {

ContextSchema TrigramSchema() { return {{"w-1", "w-2"}, {{0, 1}, {0}, {}}}; }

Context TrigramContext(const IndexedSentence& words, size_t k) {
  auto at = [&](size_t i) -> WordId {
    if (i == 0) return Vocabulary::kBos;
    return i <= words.size() ? words[i - 1] : Vocabulary::kEos;
  };
  Context c;
  c.fields[0] = at(k - 1);
  c.fields[1] = k >= 2 ? at(k - 2) : kNoSymbol;
  return c;
}

TrigramModel::TrigramModel(Vocabulary vocab, ComponentModel model)
    : vocab_(std::move(vocab)), model_(std::move(model)) {
  if (model_.num_outcomes() != vocab_.num_words() - 1)
    throw Error(ErrorCode::kVocabularyMismatch, "trigram outcome space does not match vocabulary");
}

double TrigramModel::Prob(WordId word, WordId prev1, WordId prev2) const {
  Context c;
  c.fields[0] = prev1;
  c.fields[1] = prev2;
  return model_.Prob(WordOutcome(word), c);
}

std::vector<double> TrigramModel::SentenceProbs(const IndexedSentence& words) const {
  std::vector<double> probs;
  probs.reserve(words.size() + 1);
  for (size_t k = 1; k <= words.size() + 1; ++k) {
    const WordId w = k <= words.size() ? words[k - 1] : Vocabulary::kEos;
    probs.push_back(model_.Prob(WordOutcome(w), TrigramContext(words, k)));
  }
  return probs;
}

void TrigramModel::Write(std::ostream& out) const {
  out << "#slm-trigram 1\n";
  out << "split-seed " << split_seed << '\n';
  out << "pool-check " << (pool_check ? 1 : 0) << '\n';
  vocab_.Write(out);
  model_.Write("trigram", out);
}

TrigramModel TrigramModel::Read(std::istream& in) {
  LineReader reader(in);
  auto header = reader.Tokens();
  if (header.size() != 2 || header[0] != "#slm-trigram") reader.Fail("not a trigram model file");
  if (header[1] != "1") reader.Fail("unsupported trigram file version " + header[1]);
  auto args = reader.Expect("split-seed");
  if (args.size() != 1) reader.Fail("malformed 'split-seed' line");
  const auto seed = static_cast<uint64_t>(ParseInt(args[0], reader.line_number()));
  args = reader.Expect("pool-check");
  if (args.size() != 1) reader.Fail("malformed 'pool-check' line");
  const bool pool = args[0] == "1";
  Vocabulary vocab = Vocabulary::Read(reader);
  ComponentModel model = ComponentModel::Read("trigram", reader);
  if (model.num_outcomes() != vocab.num_words() - 1)
    reader.Fail("trigram outcome space does not match vocabulary");
  TrigramModel out(std::move(vocab), std::move(model));
  out.split_seed = seed;
  out.pool_check = pool;
  return out;
}

void TrigramModel::Save(const std::string& path) const {
  auto out = OpenOutput(path);
  Write(out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

TrigramModel TrigramModel::Load(const std::string& path) {
  auto in = OpenInput(path);
  return Read(in);
}

TrigramModel TrainTrigram(const std::vector<IndexedSentence>& sentences, const Vocabulary& vocab,
                          uint64_t split_seed, bool pool_check,
                          const WeightEstimationOptions& options) {
  if (sentences.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training corpus");
  const std::vector<bool> check = CheckMembership(sentences.size(), split_seed);
  EventCounts main, held;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    for (size_t k = 1; k <= s.size() + 1; ++k) {
      const WordId w = k <= s.size() ? s[k - 1] : Vocabulary::kEos;
      (check[i] ? held : main).Add(TrigramContext(s, k), WordOutcome(w));
    }
  }
  Vocabulary words;
  for (WordId w = 3; w < vocab.num_words(); ++w) words.AddWord(vocab.WordString(w));
  ComponentEstimate est = EstimateComponent(TrigramSchema(), words.num_words() - 1, main, held,
                                            pool_check, options);
  TrigramModel model(std::move(words), std::move(est.model));
  model.split_seed = split_seed;
  model.pool_check = pool_check;
  return model;
}

double InterpProb(double lambda, double trigram_prob, double slm_prob) {
  if (lambda == 1.0) return trigram_prob;
  if (lambda == 0.0) return slm_prob;
  return lambda * trigram_prob + (1.0 - lambda) * slm_prob;
}

InterpolatedLm::InterpolatedLm(const TrigramModel* trigram, const StructuredLm* slm,
                               double lambda, BeamOptions beam)
    : trigram_(trigram), slm_(slm), lambda_(lambda), beam_(beam) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  if (lambda > 0.0 && trigram == nullptr)
    throw Error(ErrorCode::kInvalidArgument, "lambda > 0 needs a trigram model");
  if (lambda < 1.0 && slm == nullptr)
    throw Error(ErrorCode::kInvalidArgument, "lambda < 1 needs a structured model");
  if (trigram && slm && !trigram->vocab().SameWords(slm->vocab()))
    throw Error(ErrorCode::kVocabularyMismatch,
                "trigram and structured model use different word vocabularies");
}

std::vector<double> InterpolatedLm::SentenceProbs(const IndexedSentence& words) const {
  if (lambda_ == 1.0) return trigram_->SentenceProbs(words);
  std::vector<double> slm = SearchSentence(*slm_, words, beam_).word_probs;
  if (lambda_ == 0.0) return slm;
  const std::vector<double> tri = trigram_->SentenceProbs(words);
  for (size_t i = 0; i < slm.size(); ++i) slm[i] = InterpProb(lambda_, tri[i], slm[i]);
  return slm;
}

ComponentProbs ComputeComponentProbs(const TrigramModel* trigram, const StructuredLm* slm,
                                     const std::vector<IndexedSentence>& sentences,
                                     const BeamOptions& beam, int threads) {
  if (trigram && slm && !trigram->vocab().SameWords(slm->vocab()))
    throw Error(ErrorCode::kVocabularyMismatch,
                "trigram and structured model use different word vocabularies");
  ComponentProbs out;
  if (trigram) out.trigram.resize(sentences.size());
  if (slm) out.slm.resize(sentences.size());
  ParallelFor(sentences.size(), threads, [&](size_t i) {
    if (trigram) out.trigram[i] = trigram->SentenceProbs(sentences[i]);
    if (slm) out.slm[i] = SearchSentence(*slm, sentences[i], beam).word_probs;
  });
  return out;
}

double MixturePerplexity(const ComponentProbs& probs, double lambda) {
  if (lambda == 1.0) return PerplexityFromProbs(probs.trigram).perplexity;
  if (lambda == 0.0) return PerplexityFromProbs(probs.slm).perplexity;
  if (probs.trigram.size() != probs.slm.size())
    throw Error(ErrorCode::kInvalidArgument, "component probabilities do not align");
  std::vector<std::vector<double>> mixed(probs.slm.size());
  for (size_t i = 0; i < mixed.size(); ++i) {
    mixed[i].resize(probs.slm[i].size());
    for (size_t k = 0; k < mixed[i].size(); ++k)
      mixed[i][k] = InterpProb(lambda, probs.trigram[i][k], probs.slm[i][k]);
  }
  return PerplexityFromProbs(mixed).perplexity;
}

double TuneLambda(const ComponentProbs& probs, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty lambda grid");
  double best_lambda = 0.0;
  double best_ppl = 0.0;
  bool first = true;
  for (double lambda : grid) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw Error(ErrorCode::kInvalidArgument, "lambda grid must lie in [0, 1]");
    const double ppl = MixturePerplexity(probs, lambda);
    if (first || ppl < best_ppl || (ppl == best_ppl && lambda < best_lambda)) {
      best_lambda = lambda;
      best_ppl = ppl;
      first = false;
    }
  }
  return best_lambda;
}

double TuneLambda(const TrigramModel& trigram, const StructuredLm& slm,
                  const std::vector<IndexedSentence>& held_out, const std::vector<double>& grid,
                  const BeamOptions& beam, int threads) {
  return TuneLambda(ComputeComponentProbs(&trigram, &slm, held_out, beam, threads), grid);
}

}  // namespace slm
