#include "slm/slm.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "slm/em.h"
#include "slm/error.h"
#include "slm/estimation.h"
#include "slm/eval.h"
#include "slm/ngram.h"
#include "slm/parallel.h"
#include "slm/rescoring.h"
#include "slm/search.h"
#include "slm/slm_model.h"
#include "slm/text.h"
#include "slm/text_io.h"
#include "slm/treebank.h"

struct slm_model {
  slm::StructuredLm lm;
};

struct slm_trigram {
  slm::TrigramModel model;
};

struct slm_eval {
  slm::ComponentProbs probs;
  size_t sentences = 0;
  size_t tokens = 0;
  double oov_rate = 0.0;
  bool has_model = false;
  bool has_trigram = false;
};

struct slm_nbest {
  std::vector<slm::NBestList> lists;
};

struct slm_nbest_scores {
  std::unique_ptr<slm::NBestScores> scores;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
slm_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SLM_OK;
  } catch (const slm::Error& e) {
    last_error = e.what();
    return static_cast<slm_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return SLM_ERR_INTERNAL;
}

void Require(bool condition, const char* what) {
  if (!condition) throw slm::Error(slm::ErrorCode::kInvalidArgument, what);
}

slm::BeamOptions ToBeam(const slm_beam& beam) {
  Require(beam.max_entries >= 0, "beam max_entries must be non-negative");
  slm::BeamOptions out;
  out.max_entries = beam.max_entries;
  out.log_width = (beam.log_width <= 0.0 || std::isinf(beam.log_width))
                      ? std::numeric_limits<double>::infinity()
                      : beam.log_width;
  Require(!std::isnan(beam.log_width), "beam log_width is NaN");
  return out;
}

std::optional<slm::RewriteTable> ReadRules(const char* path) {
  if (path == nullptr) return std::nullopt;
  return slm::RewriteTable::ReadFile(path);
}

std::vector<slm::IndexedSentence> ReadText(const char* path, const char* rewrite_path,
                                           const slm::Vocabulary& vocab) {
  Require(path != nullptr, "text path is null");
  const auto rules = ReadRules(rewrite_path);
  std::vector<slm::IndexedSentence> out;
  for (const auto& s : slm::ReadSentences(path))
    out.push_back(slm::MapToVocabulary(rules ? slm::Retokenize(s, *rules) : s, vocab));
  return out;
}

void CheckSourceName(const char* source) {
  Require(source != nullptr && *source != '\0', "source name is empty");
  for (const char* c = source; *c; ++c)
    Require(!std::isspace(static_cast<unsigned char>(*c)), "source name contains whitespace");
}

void FillCounts(const slm::EditCounts& c, slm_wer_counts* out) {
  out->substitutions = c.substitutions;
  out->deletions = c.deletions;
  out->insertions = c.insertions;
  out->reference_words = c.reference_words;
  out->rate = c.rate();
}

}  // namespace

extern "C" {

const char* slm_status_name(slm_status status) {
  return slm::ErrorCodeName(static_cast<slm::ErrorCode>(status));
}

const char* slm_last_error(void) { return last_error.c_str(); }

void slm_set_warnings(int enabled) { slm::SetWarningsEnabled(enabled != 0); }

slm_beam slm_beam_default(void) {
  const slm::BeamOptions d;
  return {d.max_entries, d.log_width};
}

slm_init_options slm_init_options_default(void) {
  const slm::InitOptions d;
  return {d.split_seed, 0, 0, 0, d.pool_check ? 1 : 0, nullptr};
}

slm_status slm_model_init(const char* parses_path, const char* vocab_path,
                          const char* headrules_path, const slm_init_options* options,
                          slm_model** out) {
  return Guard([&] {
    Require(parses_path && vocab_path && out, "null argument");
    const slm_init_options opts = options ? *options : slm_init_options_default();
    slm::InitOptions init;
    init.split_seed = opts.split_seed;
    init.mode = opts.null_only ? slm::ParserMode::kNullOnly : slm::ParserMode::kFull;
    init.collapse_tags = opts.collapse_tags != 0;
    init.collapse_labels = opts.collapse_labels != 0;
    init.pool_check = opts.pool_check != 0;
    if (opts.source) {
      CheckSourceName(opts.source);
      init.source = opts.source;
    }
    std::optional<slm::HeadRules> rules;
    if (headrules_path) rules = slm::HeadRules::ReadFile(headrules_path);
    init.head_rules = rules ? &*rules : nullptr;
    const slm::Vocabulary words = slm::Vocabulary::ReadWordFile(std::string(vocab_path));
    const auto trees = slm::ReadParseFile(std::string(parses_path));
    *out = new slm_model{slm::InitializeModel(trees, words, init)};
  });
}

slm_status slm_model_load(const char* path, slm_model** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new slm_model{slm::StructuredLm::Load(path)};
  });
}

slm_status slm_model_save(const slm_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "null argument");
    model->lm.Save(path);
  });
}

void slm_model_free(slm_model* model) { delete model; }

slm_status slm_model_get_info(const slm_model* model, slm_model_info* out) {
  return Guard([&] {
    Require(model && out, "null argument");
    const auto& lm = model->lm;
    out->iteration = lm.iteration;
    out->null_only = lm.mode() == slm::ParserMode::kNullOnly ? 1 : 0;
    out->split_seed = lm.split_seed;
    out->num_words = lm.vocab().num_words();
    out->num_tags = lm.vocab().num_tags();
    out->num_labels = lm.vocab().num_labels();
    for (int c = 0; c < slm::kNumComponents; ++c)
      out->parameters[c] = slm::CountParameters(lm.component(static_cast<slm::Component>(c)));
  });
}

slm_status slm_model_get_source(const slm_model* model, char* buffer, size_t size) {
  return Guard([&] {
    Require(model && buffer && size > 0, "null argument");
    const std::string& s = model->lm.source;
    const size_t n = std::min(size - 1, s.size());
    s.copy(buffer, n);
    buffer[n] = '\0';
  });
}

slm_status slm_model_set_source(slm_model* model, const char* source) {
  return Guard([&] {
    Require(model != nullptr, "null argument");
    CheckSourceName(source);
    model->lm.source = source;
  });
}

slm_status slm_model_set_split_seed(slm_model* model, uint64_t seed) {
  return Guard([&] {
    Require(model != nullptr, "null argument");
    model->lm.split_seed = seed;
  });
}

slm_train_options slm_train_options_default(void) {
  const slm::TrainOptions d;
  return {d.iterations, d.em.nbest, slm_beam_default(), d.em.threads, nullptr};
}

slm_status slm_model_train(slm_model* model, const char* text_path, const char* rewrite_path,
                           const slm_train_options* options) {
  return Guard([&] {
    Require(model != nullptr, "null argument");
    const slm_train_options opts = options ? *options : slm_train_options_default();
    Require(opts.iterations >= 0, "iterations must be non-negative");
    Require(opts.nbest >= 1, "nbest must be positive");
    const auto sentences = ReadText(text_path, rewrite_path, model->lm.vocab());
    slm::TrainOptions train;
    train.iterations = opts.iterations;
    train.em.nbest = opts.nbest;
    train.em.beam = ToBeam(opts.beam);
    train.em.threads = std::max(1, opts.threads);
    std::vector<slm::IterationRecord> trace;
    slm::StructuredLm trained = slm::Train(model->lm, sentences, train, &trace);
    if (opts.metrics_path) {
      auto out = slm::OpenOutput(opts.metrics_path);
      slm::WriteTrace(out, trace);
      if (!out) throw slm::Error(slm::ErrorCode::kIo, "failed writing metrics file");
    }
    model->lm = std::move(trained);
  });
}

slm_status slm_model_parse(const slm_model* model, const char* text_path,
                           const char* rewrite_path, slm_beam beam, int threads,
                           const char* out_path) {
  return Guard([&] {
    Require(model && out_path, "null argument");
    const auto sentences = ReadText(text_path, rewrite_path, model->lm.vocab());
    const slm::BeamOptions b = ToBeam(beam);
    std::vector<std::string> lines(sentences.size());
    slm::ParallelFor(sentences.size(), std::max(1, threads), [&](size_t i) {
      const slm::BestParseResult best = slm::BestParse(model->lm, sentences[i], b);
      const slm::ParseTreePtr words = slm::StripSentenceEnd(best.tree);
      lines[i] = words ? slm::FormatTree(*words, model->lm.vocab()) : std::string("()");
    });
    auto out = slm::OpenOutput(out_path);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw slm::Error(slm::ErrorCode::kIo, "failed writing parse file");
  });
}

slm_status slm_trigram_train(const char* text_path, const char* vocab_path,
                             const char* rewrite_path, uint64_t split_seed, slm_trigram** out) {
  return Guard([&] {
    Require(text_path && vocab_path && out, "null argument");
    const slm::Vocabulary vocab = slm::Vocabulary::ReadWordFile(std::string(vocab_path));
    const auto sentences = ReadText(text_path, rewrite_path, vocab);
    *out = new slm_trigram{slm::TrainTrigram(sentences, vocab, split_seed)};
  });
}

slm_status slm_trigram_load(const char* path, slm_trigram** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new slm_trigram{slm::TrigramModel::Load(path)};
  });
}

slm_status slm_trigram_save(const slm_trigram* trigram, const char* path) {
  return Guard([&] {
    Require(trigram && path, "null argument");
    trigram->model.Save(path);
  });
}

void slm_trigram_free(slm_trigram* trigram) { delete trigram; }

slm_status slm_eval_create(const slm_model* model, const slm_trigram* trigram,
                           const char* text_path, const char* rewrite_path, slm_beam beam,
                           int threads, slm_eval** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(model || trigram, "a model or a trigram is required");
    const slm::StructuredLm* lm = model ? &model->lm : nullptr;
    const slm::TrigramModel* tri = trigram ? &trigram->model : nullptr;
    if (lm && tri && !lm->vocab().SameWords(tri->vocab()))
      throw slm::Error(slm::ErrorCode::kVocabularyMismatch,
                       "trigram and structured model use different word vocabularies");
    const auto sentences = ReadText(text_path, rewrite_path, lm ? lm->vocab() : tri->vocab());
    auto eval = std::make_unique<slm_eval>();
    eval->probs = slm::ComputeComponentProbs(tri, lm, sentences, ToBeam(beam), std::max(1, threads));
    eval->sentences = sentences.size();
    for (const auto& s : sentences) eval->tokens += s.size() + 1;
    eval->oov_rate = slm::OovRate(sentences);
    eval->has_model = lm != nullptr;
    eval->has_trigram = tri != nullptr;
    *out = eval.release();
  });
}

void slm_eval_free(slm_eval* eval) { delete eval; }

slm_status slm_eval_perplexity(const slm_eval* eval, double lambda, double* out) {
  return Guard([&] {
    Require(eval && out, "null argument");
    Require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
    Require(lambda == 0.0 || eval->has_trigram, "lambda > 0 needs a trigram");
    Require(lambda == 1.0 || eval->has_model, "lambda < 1 needs a structured model");
    *out = slm::MixturePerplexity(eval->probs, lambda);
  });
}

slm_status slm_eval_tune_lambda(const slm_eval* eval, const double* grid, size_t size,
                                double* out) {
  return Guard([&] {
    Require(eval && grid && out, "null argument");
    Require(eval->has_model && eval->has_trigram, "tuning needs both models");
    *out = slm::TuneLambda(eval->probs, std::vector<double>(grid, grid + size));
  });
}

slm_status slm_eval_get_info(const slm_eval* eval, slm_eval_info* out) {
  return Guard([&] {
    Require(eval && out, "null argument");
    out->sentences = eval->sentences;
    out->tokens = eval->tokens;
    out->oov_rate = eval->oov_rate;
  });
}

slm_rescore_weights slm_rescore_weights_default(void) {
  const slm::RescoreWeights d;
  return {d.acoustic_scale, d.lm_scale, d.word_insertion_penalty};
}

slm_status slm_nbest_load(const char* path, slm_nbest** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new slm_nbest{slm::ReadNBestFile(path)};
  });
}

void slm_nbest_free(slm_nbest* nbest) { delete nbest; }

size_t slm_nbest_size(const slm_nbest* nbest) { return nbest ? nbest->lists.size() : 0; }

slm_status slm_nbest_baseline_wer(const slm_nbest* nbest, slm_wer_counts* out) {
  return Guard([&] {
    Require(nbest && out, "null argument");
    std::vector<size_t> first(nbest->lists.size(), 0);
    for (size_t i = 0; i < nbest->lists.size(); ++i) {
      const auto& hyps = nbest->lists[i].hypotheses;
      for (size_t h = 0; h < hyps.size(); ++h) {
        if (hyps[h].rank < hyps[first[i]].rank) first[i] = h;
      }
    }
    FillCounts(slm::ComputeWer(slm::Selections(nbest->lists, first), slm::References(nbest->lists)),
               out);
  });
}

slm_status slm_nbest_oracle_wer(const slm_nbest* nbest, slm_wer_counts* out) {
  return Guard([&] {
    Require(nbest && out, "null argument");
    FillCounts(slm::OracleWer(nbest->lists), out);
  });
}

slm_status slm_nbest_score(const slm_nbest* nbest, const slm_model* model,
                           const slm_trigram* trigram, const char* rewrite_path, slm_beam beam,
                           int threads, slm_nbest_scores** out) {
  return Guard([&] {
    Require(nbest && out, "null argument");
    const auto rules = ReadRules(rewrite_path);
    auto scores = std::make_unique<slm_nbest_scores>();
    scores->scores = std::make_unique<slm::NBestScores>(
        nbest->lists, model ? &model->lm : nullptr, trigram ? &trigram->model : nullptr,
        rules ? &*rules : nullptr, ToBeam(beam), std::max(1, threads));
    *out = scores.release();
  });
}

void slm_nbest_scores_free(slm_nbest_scores* scores) { delete scores; }

slm_status slm_nbest_rescore(const slm_nbest_scores* scores, double lambda,
                             const slm_rescore_weights* weights, const char* selections_path,
                             slm_wer_counts* out) {
  return Guard([&] {
    Require(scores && out, "null argument");
    const slm_rescore_weights w = weights ? *weights : slm_rescore_weights_default();
    const slm::RescoreWeights rw{w.acoustic_scale, w.lm_scale, w.word_insertion_penalty};
    const auto& lists = scores->scores->lists();
    const auto chosen = scores->scores->Select(lambda, rw);
    const auto selected = slm::Selections(lists, chosen);
    if (selections_path) {
      auto file = slm::OpenOutput(selections_path);
      for (size_t i = 0; i < lists.size(); ++i) {
        file << lists[i].id;
        for (const auto& word : lists[i].hypotheses[chosen[i]].words) file << ' ' << word;
        file << '\n';
      }
      if (!file) throw slm::Error(slm::ErrorCode::kIo, "failed writing selections");
    }
    FillCounts(slm::ComputeWer(selected, slm::References(lists)), out);
  });
}

slm_status slm_wer_files(const char* hypothesis_path, const char* reference_path,
                         slm_wer_counts* out) {
  return Guard([&] {
    Require(hypothesis_path && reference_path && out, "null argument");
    FillCounts(slm::ComputeWer(slm::ReadTranscriptFile(hypothesis_path),
                               slm::ReadTranscriptFile(reference_path)),
               out);
  });
}

}  // extern "C"
