// Command-line front end. Uses only the C interface.
#include <slm/slm.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

namespace {

// Exit codes: library failures map to kStatusExitBase + status.
constexpr int kStatusExitBase = 10;

class Failure : public std::runtime_error {
 public:
  Failure(slm_status status, const std::string& context)
      : std::runtime_error(context + ": " + slm_last_error()), status_(status) {}
  slm_status status() const { return status_; }

 private:
  slm_status status_;
};

void Check(slm_status status, const std::string& context) {
  if (status != SLM_OK) throw Failure(status, context);
}

struct ModelDeleter {
  void operator()(slm_model* m) const { slm_model_free(m); }
};
struct TrigramDeleter {
  void operator()(slm_trigram* t) const { slm_trigram_free(t); }
};
struct EvalDeleter {
  void operator()(slm_eval* e) const { slm_eval_free(e); }
};
struct NBestDeleter {
  void operator()(slm_nbest* n) const { slm_nbest_free(n); }
};
struct ScoresDeleter {
  void operator()(slm_nbest_scores* s) const { slm_nbest_scores_free(s); }
};
using ModelPtr = std::unique_ptr<slm_model, ModelDeleter>;
using TrigramPtr = std::unique_ptr<slm_trigram, TrigramDeleter>;
using EvalPtr = std::unique_ptr<slm_eval, EvalDeleter>;
using NBestPtr = std::unique_ptr<slm_nbest, NBestDeleter>;
using ScoresPtr = std::unique_ptr<slm_nbest_scores, ScoresDeleter>;

ModelPtr LoadModel(const std::string& path) {
  slm_model* m = nullptr;
  Check(slm_model_load(path.c_str(), &m), "loading model '" + path + "'");
  return ModelPtr(m);
}

TrigramPtr LoadTrigram(const std::string& path) {
  slm_trigram* t = nullptr;
  Check(slm_trigram_load(path.c_str(), &t), "loading trigram '" + path + "'");
  return TrigramPtr(t);
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Common {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int beam_entries = slm_beam_default().max_entries;
  double beam_logwidth = slm_beam_default().log_width;
  std::string rewrite;

  slm_beam beam() const { return {beam_entries, beam_logwidth}; }
};

void AddSearchFlags(CLI::App* cmd, Common* c) {
  cmd->add_option("--threads", c->threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--beam-entries", c->beam_entries, "Hypotheses kept per stack (0 = unbounded)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--beam-logwidth", c->beam_logwidth,
                  "Log-probability width of each stack (<= 0 = unbounded)")->capture_default_str();
  cmd->add_option("--rewrite", c->rewrite, "Token rewrite table (token TAB replacement)")
      ->check(CLI::ExistingFile);
}

// Split seed: explicit flag, then SLM_SEED, then the built-in default.
uint64_t ResolveSeed(const std::optional<uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SLM_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno != 0 || env[0] == '-')
      throw CLI::ValidationError("SLM_SEED", std::string("not an unsigned integer: '") + env + "'");
    return v;
  }
  return slm_init_options_default().split_seed;
}

std::string Source(const slm_model* m) {
  char buf[256];
  Check(slm_model_get_source(m, buf, sizeof(buf)), "reading model source");
  return buf;
}

std::string Fixed(double v, int digits) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Pad(const std::string& s, size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

// Column grid: 0.0, 1.0 and any requested lambda, ascending.
std::vector<double> LambdaColumns(const std::vector<double>& requested) {
  std::vector<double> cols{0.0, 1.0};
  for (double l : requested) {
    if (l < 0.0 || l > 1.0) throw CLI::ValidationError("--lambda", "must lie in [0, 1]");
    cols.push_back(l);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

void PrintHeader(const std::string& first, const std::string& second,
                 const std::vector<double>& cols) {
  std::cout << Pad(first, 14, true) << Pad(second, 6);
  for (double l : cols) std::cout << Pad("lambda=" + Fixed(l, 1), 13);
  std::cout << '\n';
}

int RunInit(const std::string& parses, const std::string& vocab, const std::string& headrules,
            const std::string& out, const std::optional<uint64_t>& seed, bool null_only,
            bool collapse_tags, bool collapse_labels, bool no_pool, const std::string& source) {
  slm_init_options opts = slm_init_options_default();
  opts.split_seed = ResolveSeed(seed);
  opts.null_only = null_only;
  opts.collapse_tags = collapse_tags;
  opts.collapse_labels = collapse_labels;
  opts.pool_check = !no_pool;
  opts.source = OrNull(source);
  slm_model* raw = nullptr;
  Check(slm_model_init(parses.c_str(), vocab.c_str(), OrNull(headrules), &opts, &raw),
        "initializing from '" + parses + "'");
  ModelPtr model(raw);
  Check(slm_model_save(model.get(), out.c_str()), "writing '" + out + "'");
  slm_model_info info;
  Check(slm_model_get_info(model.get(), &info), "model info");
  std::cout << "source " << Source(model.get()) << "  words " << info.num_words << "  tags "
            << info.num_tags << "  labels " << info.num_labels << "  parameters "
            << info.parameters[0] << '/' << info.parameters[1] << '/' << info.parameters[2]
            << '\n';
  return 0;
}

int RunTrain(const std::string& model_path, const std::string& text, std::string out, int iters,
             int nbest, const std::string& metrics, const Common& c) {
  ModelPtr model = LoadModel(model_path);
  slm_train_options opts = slm_train_options_default();
  opts.iterations = iters;
  opts.nbest = nbest;
  opts.beam = c.beam();
  opts.threads = c.threads;
  opts.metrics_path = OrNull(metrics);
  Check(slm_model_train(model.get(), text.c_str(), OrNull(c.rewrite), &opts),
        "training on '" + text + "'");
  if (out.empty()) out = model_path;
  Check(slm_model_save(model.get(), out.c_str()), "writing '" + out + "'");
  slm_model_info info;
  Check(slm_model_get_info(model.get(), &info), "model info");
  std::cout << "iteration " << info.iteration << "  parameters " << info.parameters[0] << '/'
            << info.parameters[1] << '/' << info.parameters[2] << '\n';
  return 0;
}

int RunPpl(const std::vector<std::string>& models, const std::string& trigram_path,
           const std::string& text, const std::vector<double>& lambdas, bool tune,
           const Common& c) {
  if (models.empty() && trigram_path.empty())
    throw CLI::ValidationError("ppl", "needs --model or --trigram");
  TrigramPtr trigram;
  if (!trigram_path.empty()) trigram = LoadTrigram(trigram_path);
  const std::vector<double> cols = LambdaColumns(lambdas);

  struct Row {
    std::string source, iter;
    EvalPtr eval;
  };
  std::vector<Row> rows;
  for (const auto& path : models) {
    ModelPtr model = LoadModel(path);
    slm_eval* e = nullptr;
    Check(slm_eval_create(model.get(), trigram.get(), text.c_str(), OrNull(c.rewrite), c.beam(),
                          c.threads, &e),
          "evaluating '" + path + "' on '" + text + "'");
    slm_model_info info;
    Check(slm_model_get_info(model.get(), &info), "model info");
    rows.push_back({Source(model.get()), std::to_string(info.iteration), EvalPtr(e)});
  }
  if (models.empty()) {
    slm_eval* e = nullptr;
    Check(slm_eval_create(nullptr, trigram.get(), text.c_str(), OrNull(c.rewrite), c.beam(),
                          c.threads, &e),
          "evaluating trigram on '" + text + "'");
    rows.push_back({"trigram", "-", EvalPtr(e)});
  }

  slm_eval_info info;
  Check(slm_eval_get_info(rows.front().eval.get(), &info), "eval info");
  std::cout << "sentences " << info.sentences << "  tokens " << info.tokens << "  oov-rate "
            << Fixed(100.0 * info.oov_rate, 2) << "%\n";
  PrintHeader("source", "iter", cols);
  for (const auto& row : rows) {
    std::cout << Pad(row.source, 14, true) << Pad(row.iter, 6);
    for (double l : cols) {
      std::string cell = "-";
      const bool available = (l == 0.0 || trigram) && (l == 1.0 || !models.empty());
      if (available) {
        double ppl = 0.0;
        Check(slm_eval_perplexity(row.eval.get(), l, &ppl), "perplexity");
        cell = Fixed(ppl, 3);
      }
      std::cout << Pad(cell, 13);
    }
    std::cout << '\n';
  }
  if (tune) {
    if (!trigram || models.empty())
      throw CLI::ValidationError("--tune", "needs both --model and --trigram");
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    for (const auto& row : rows) {
      double best = 0.0, ppl = 0.0;
      Check(slm_eval_tune_lambda(row.eval.get(), grid.data(), grid.size(), &best), "tuning");
      Check(slm_eval_perplexity(row.eval.get(), best, &ppl), "perplexity");
      std::cout << "tuned " << row.source << " iter " << row.iter << "  lambda "
                << Fixed(best, 2) << "  ppl " << Fixed(ppl, 3) << '\n';
    }
  }
  return 0;
}

std::string Wer(const slm_wer_counts& w) {
  return Fixed(100.0 * w.rate, 2) + "% (S=" + std::to_string(w.substitutions) +
         " D=" + std::to_string(w.deletions) + " I=" + std::to_string(w.insertions) +
         " N=" + std::to_string(w.reference_words) + ")";
}

int RunRescore(const std::vector<std::string>& models, const std::string& trigram_path,
               const std::string& nbest_path, double lambda, const slm_rescore_weights& weights,
               const std::string& selections, const Common& c) {
  if (models.empty() && lambda != 1.0)
    throw CLI::ValidationError("rescore", "lambda < 1 needs --model");
  slm_nbest* raw = nullptr;
  Check(slm_nbest_load(nbest_path.c_str(), &raw), "reading n-best file '" + nbest_path + "'");
  NBestPtr nbest(raw);
  TrigramPtr trigram;
  if (!trigram_path.empty()) trigram = LoadTrigram(trigram_path);
  const std::vector<double> cols = LambdaColumns({lambda});

  slm_wer_counts baseline, oracle;
  Check(slm_nbest_baseline_wer(nbest.get(), &baseline), "baseline WER");
  Check(slm_nbest_oracle_wer(nbest.get(), &oracle), "oracle WER");
  std::cout << "utterances " << slm_nbest_size(nbest.get()) << '\n';
  std::cout << "1-best WER  " << Wer(baseline) << '\n';
  std::cout << "oracle WER  " << Wer(oracle) << '\n';
  PrintHeader("source", "iter", cols);

  struct Row {
    std::string source, iter;
    ModelPtr model;
  };
  std::vector<Row> rows;
  for (const auto& path : models) {
    ModelPtr m = LoadModel(path);
    slm_model_info info;
    Check(slm_model_get_info(m.get(), &info), "model info");
    rows.push_back({Source(m.get()), std::to_string(info.iteration), std::move(m)});
  }
  if (rows.empty()) rows.push_back({trigram ? "trigram" : "baseline-lm", "-", nullptr});

  for (size_t r = 0; r < rows.size(); ++r) {
    slm_nbest_scores* s = nullptr;
    Check(slm_nbest_score(nbest.get(), rows[r].model.get(), trigram.get(), OrNull(c.rewrite),
                          c.beam(), c.threads, &s),
          "scoring '" + nbest_path + "'");
    ScoresPtr scores(s);
    std::cout << Pad(rows[r].source, 14, true) << Pad(rows[r].iter, 6);
    for (double l : cols) {
      std::string cell = "-";
      if (l == 1.0 || rows[r].model) {
        const bool write = r == 0 && l == lambda && !selections.empty();
        slm_wer_counts w;
        Check(slm_nbest_rescore(scores.get(), l, &weights, write ? selections.c_str() : nullptr,
                                &w),
              "rescoring");
        cell = Fixed(100.0 * w.rate, 2) + "%";
      }
      std::cout << Pad(cell, 13);
    }
    std::cout << '\n';
  }
  return 0;
}

int RunParse(const std::string& model_path, const std::string& text, const std::string& out,
             const Common& c) {
  ModelPtr model = LoadModel(model_path);
  Check(slm_model_parse(model.get(), text.c_str(), OrNull(c.rewrite), c.beam(), c.threads,
                        out.c_str()),
        "parsing '" + text + "'");
  return 0;
}

int RunWer(const std::string& hyp, const std::string& ref) {
  slm_wer_counts w;
  Check(slm_wer_files(hyp.c_str(), ref.c_str(), &w), "scoring '" + hyp + "'");
  std::cout << "WER " << Wer(w) << '\n';
  return 0;
}

int RunTrigram(const std::string& text, const std::string& vocab, const std::string& out,
               const std::optional<uint64_t>& seed, const std::string& rewrite) {
  slm_trigram* raw = nullptr;
  Check(slm_trigram_train(text.c_str(), vocab.c_str(), OrNull(rewrite), ResolveSeed(seed), &raw),
        "training trigram on '" + text + "'");
  TrigramPtr trigram(raw);
  Check(slm_trigram_save(trigram.get(), out.c_str()), "writing '" + out + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured language model toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  // init
  auto* init = app.add_subcommand("init", "Build a model from bracketed parses");
  std::string parses, vocab, headrules, out, source;
  std::optional<uint64_t> seed;
  bool null_only = false, collapse_tags = false, collapse_labels = false, no_pool = false;
  init->add_option("--parses", parses, "Bracketed parse file, one tree per line")
      ->required()->check(CLI::ExistingFile);
  init->add_option("--vocab", vocab, "Word vocabulary, one word per line")
      ->required()->check(CLI::ExistingFile);
  init->add_option("--headrules", headrules, "Head-rule table (built-in table if omitted)")
      ->check(CLI::ExistingFile);
  init->add_option("--out", out, "Output model file")->required();
  init->add_option("--split-seed", seed, "Seed of the main/check split (env SLM_SEED)");
  init->add_flag("--null-only", null_only, "Force the null parser action");
  init->add_flag("--collapse-tags", collapse_tags, "Use a single tag type");
  init->add_flag("--collapse-labels", collapse_labels, "Use a single label type");
  init->add_flag("--no-pool-check", no_pool, "Keep check counts out of the final tables");
  init->add_option("--source", source, "Name recorded in the model for reports");

  // train
  auto* train = app.add_subcommand("train", "Re-estimate a model with N-best EM");
  Common train_common;
  std::string model_path, text, metrics;
  int iters = slm_train_options_default().iterations;
  int nbest_size = slm_train_options_default().nbest;
  train->add_option("--model", model_path, "Input model")->required()->check(CLI::ExistingFile);
  train->add_option("--text", text, "Training text, one sentence per line")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Output model (default: overwrite --model)");
  train->add_option("--iters", iters, "EM iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--nbest", nbest_size, "Parses kept per sentence")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--metrics", metrics, "Per-iteration metrics (TSV)");
  AddSearchFlags(train, &train_common);

  // ppl
  auto* ppl = app.add_subcommand("ppl", "Perplexity table over lambda");
  Common ppl_common;
  std::vector<std::string> models;
  std::string trigram;
  std::vector<double> lambdas{0.6};
  bool tune = false;
  ppl->add_option("--model", models, "Model file (repeatable; one row each)")->check(CLI::ExistingFile);
  ppl->add_option("--trigram", trigram, "Trigram model file")->check(CLI::ExistingFile);
  ppl->add_option("--text", text, "Evaluation text")->required()->check(CLI::ExistingFile);
  ppl->add_option("--lambda", lambdas, "Trigram weight columns besides 0 and 1")->capture_default_str();
  ppl->add_flag("--tune", tune, "Also report the lambda minimizing perplexity on this text");
  AddSearchFlags(ppl, &ppl_common);

  // rescore
  auto* rescore = app.add_subcommand("rescore", "Rescore N-best lists and report WER");
  Common rescore_common;
  std::string nbest_path, selections;
  double lambda = 0.6;
  slm_rescore_weights weights = slm_rescore_weights_default();
  rescore->add_option("--model", models, "Model file (repeatable; one row each)")->check(CLI::ExistingFile);
  rescore->add_option("--trigram", trigram, "Trigram model (per-word mixture)")->check(CLI::ExistingFile);
  rescore->add_option("--nbest", nbest_path, "N-best file")->required()->check(CLI::ExistingFile);
  rescore->add_option("--lambda", lambda, "Weight of the trigram or the file's LM score")->capture_default_str();
  rescore->add_option("--acoustic-scale", weights.acoustic_scale, "Acoustic score weight")->capture_default_str();
  rescore->add_option("--lm-scale", weights.lm_scale, "LM log-probability weight")->capture_default_str();
  rescore->add_option("--wip", weights.word_insertion_penalty, "Per-word insertion bonus")->capture_default_str();
  rescore->add_option("--selections", selections, "Write chosen hypotheses (first model, --lambda)");
  AddSearchFlags(rescore, &rescore_common);

  // parse
  auto* parse = app.add_subcommand("parse", "Write the best parse of each sentence");
  Common parse_common;
  parse->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  parse->add_option("--text", text, "Input text")->required()->check(CLI::ExistingFile);
  parse->add_option("--out", out, "Output parse file")->required();
  AddSearchFlags(parse, &parse_common);

  // wer
  auto* wer = app.add_subcommand("wer", "Score a selection file against references");
  std::string hyp, ref;
  wer->add_option("--hyp", hyp, "Hypotheses: <id> <words> per line")->required()->check(CLI::ExistingFile);
  wer->add_option("--ref", ref, "References: <id> <words> per line")->required()->check(CLI::ExistingFile);

  // trigram
  auto* tri = app.add_subcommand("trigram", "Train the interpolated trigram baseline");
  std::string tri_rewrite;
  tri->add_option("--text", text, "Training text")->required()->check(CLI::ExistingFile);
  tri->add_option("--vocab", vocab, "Word vocabulary")->required()->check(CLI::ExistingFile);
  tri->add_option("--out", out, "Output trigram file")->required();
  tri->add_option("--split-seed", seed, "Seed of the main/check split (env SLM_SEED)");
  tri->add_option("--rewrite", tri_rewrite, "Token rewrite table")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  slm_set_warnings(quiet ? 0 : 1);

  try {
    if (*init)
      return RunInit(parses, vocab, headrules, out, seed, null_only, collapse_tags,
                     collapse_labels, no_pool, source);
    if (*train) return RunTrain(model_path, text, out, iters, nbest_size, metrics, train_common);
    if (*ppl) return RunPpl(models, trigram, text, lambdas, tune, ppl_common);
    if (*rescore)
      return RunRescore(models, trigram, nbest_path, lambda, weights, selections, rescore_common);
    if (*parse) return RunParse(model_path, text, out, parse_common);
    if (*wer) return RunWer(hyp, ref);
    if (*tri) return RunTrigram(text, vocab, out, seed, tri_rewrite);
  } catch (const Failure& f) {
    std::cerr << "slm: " << slm_status_name(f.status()) << ": " << f.what() << '\n';
    return kStatusExitBase + static_cast<int>(f.status());
  } catch (const CLI::Error& e) {
    std::cerr << "slm: usage error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
