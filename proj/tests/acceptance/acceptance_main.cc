// Acceptance checks. Prints one PASS/FAIL line per criterion.
//   slm_acceptance [--cli <slm binary>] [--data <dir>] [--work <dir>] [--report-only]
// Exit status: 0 when every criterion passes (or, with --report-only, when
// every criterion ran to completion), 1 otherwise.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "enumerator.h"
#include "pipeline.h"
#include "slm/em.h"
#include "slm/error.h"
#include "slm/estimation.h"
#include "slm/eval.h"
#include "slm/ngram.h"
#include "slm/rescoring.h"
#include "slm/search.h"
#include "slm/text_io.h"
#include "synthetic.h"
#include "toy_model.h"

using namespace slm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

int Threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- 1 ----

Outcome TrigramEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto lex = slm_test::TravelLexicon();
  const Vocabulary words = slm_test::LexiconVocabulary(lex);
  const auto treebank = slm_test::GenerateTreebank(lex, 200, 101);
  const auto test = slm_test::MapAll(slm_test::Yields(slm_test::GenerateTreebank(lex, 200, 102)),
                                     words);
  InitOptions options;
  options.split_seed = 3;
  options.mode = ParserMode::kNullOnly;
  options.collapse_tags = true;
  options.collapse_labels = true;
  const StructuredLm slm = InitializeModel(treebank, words, options);
  const TrigramModel trigram =
      TrainTrigram(slm_test::MapAll(slm_test::Yields(treebank), words), words, 3);
  const ComponentProbs probs = ComputeComponentProbs(&trigram, &slm, test, BeamOptions{}, Threads());
  const double p_slm = MixturePerplexity(probs, 0.0);
  const double p_tri = MixturePerplexity(probs, 1.0);
  const double rel = std::abs(p_slm - p_tri) / p_tri;
  const double secs = Seconds(start);
  return {rel <= 1e-6 && secs < 10.0,
          "slm " + Fmt("%.9g", p_slm) + " trigram " + Fmt("%.9g", p_tri) + " rel " +
              Fmt("%.2e", rel) + " in " + Fmt("%.2f", secs) + " s"};
}

// ---- 2 ----

Outcome ProperProbability() {
  const StructuredLm model = slm_test::RandomToyModel(10, 3, 3, 120, 202);
  slm_test::Rng rng(203);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    StackSet stacks(model, BeamOptions{});
    const size_t len = rng.Below(7);
    for (size_t k = 0; k < len; ++k)
      stacks.Advance(static_cast<WordId>(Vocabulary::kUnk + 1 + rng.Below(10)));
    double total = 0.0;
    for (WordId w = Vocabulary::kEos; w < model.vocab().num_words(); ++w) total += stacks.LmProb(w);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst <= 1e-9, "max |sum - 1| " + Fmt("%.2e", worst) + " over 20 prefixes"};
}

// ---- 3 ----

Outcome ExhaustiveOracle() {
  const StructuredLm model = slm_test::RandomToyModel(2, 1, 2, 60, 303);
  std::vector<std::vector<WordId>> sentences{{}};
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].size() == 4) continue;
    for (WordId w : {WordId{3}, WordId{4}}) {
      auto s = sentences[i];
      s.push_back(w);
      sentences.push_back(s);
    }
  }
  double worst_lm = 0.0, worst_best = 0.0;
  size_t wrong_parse = 0, wrong_count = 0;
  for (const auto& sentence : sentences) {
    StackSet stacks(model, BeamOptions::Unlimited());
    std::vector<WordId> prefix;
    for (size_t k = 0; k <= sentence.size(); ++k) {
      for (WordId w = Vocabulary::kEos; w < model.vocab().num_words(); ++w)
        worst_lm = std::max(worst_lm, std::abs(stacks.LmProb(w) -
                                               slm_test::BruteForceLmProb(model, prefix, w)));
      if (k == sentence.size()) break;
      stacks.Advance(sentence[k]);
      prefix.push_back(sentence[k]);
      if (slm_test::EnumeratePrefixParses(model, prefix).size() !=
          slm_test::ClosedFormPrefixCount(static_cast<int>(prefix.size()), 1, 2))
        ++wrong_count;
    }
    if (sentence.empty()) continue;
    const auto all = slm_test::EnumerateCompleteParses(model, sentence);
    if (all.size() != slm_test::ClosedFormCompleteCount(static_cast<int>(sentence.size()), 1, 2))
      ++wrong_count;
    const slm_test::EnumeratedParse* best = &all.front();
    for (const auto& p : all)
      if (p.logprob > best->logprob ||
          (p.logprob == best->logprob && p.derivation < best->derivation))
        best = &p;
    const BestParseResult found = BestParse(model, sentence, BeamOptions::Unlimited());
    worst_best = std::max(worst_best, std::abs(found.logprob - best->logprob));
    if (!(found.derivation == best->derivation)) ++wrong_parse;
  }
  const bool pass = worst_lm <= 1e-9 && worst_best <= 1e-9 && wrong_parse == 0 && wrong_count == 0;
  return {pass, std::to_string(sentences.size()) + " sentences; lm_prob err " +
                    Fmt("%.2e", worst_lm) + ", best-parse err " + Fmt("%.2e", worst_best) +
                    ", parse mismatches " + std::to_string(wrong_parse) +
                    ", count mismatches " + std::to_string(wrong_count)};
}

// ---- 4, 5, 6, 8 ----

struct Scenario {
  StructuredLm initial;
  StructuredLm trained;
  std::vector<IterationRecord> trace;
  std::vector<ParseDerivation> last_support;  // support of the final M-step
};

Scenario RunEm(StructuredLm initial, const std::vector<IndexedSentence>& train, int iterations) {
  Scenario s{initial, {}, {}, {}};
  TrainOptions options;
  options.iterations = iterations;
  options.em.threads = Threads();
  options.observer = [&](const StructuredLm& m, const EStepResult& e) {
    if (m.iteration != iterations - 1) return;
    for (size_t i = 0; i < e.support.size(); ++i) {
      double best = -INFINITY;
      std::vector<double> lp;
      for (const auto& d : e.support[i]) {
        lp.push_back(m.JointLogProb(train[i], d));
        best = std::max(best, lp.back());
      }
      for (size_t j = 0; j < lp.size(); ++j)
        if (std::exp(lp[j] - best) > 0.0) s.last_support.push_back(e.support[i][j]);
    }
  };
  s.trained = Train(initial, train, options, &s.trace);
  return s;
}

struct Pipeline {
  slm_test::SyntheticSetup setup;
  std::vector<BracketedTree> finance;
  TrigramModel trigram;
  Scenario matched;
  Scenario mismatched;
};

Pipeline BuildPipeline() {
  Pipeline p;
  p.setup = slm_test::TravelSetup(500, 500, 100, 401);
  p.finance = slm_test::GenerateTreebank(slm_test::FinanceLexicon(), 500, 404);
  p.trigram = TrainTrigram(p.setup.train, p.setup.words, 1);
  p.matched = RunEm(slm_test::InitModel(p.setup.treebank, p.setup.words, 1), p.setup.train, 13);
  p.mismatched = RunEm(slm_test::InitModel(p.finance, p.setup.words, 1), p.setup.train, 13);
  return p;
}

Outcome Monotonicity(const Pipeline& p) {
  const auto& trace = p.matched.trace;
  double worst = INFINITY;
  std::string drops;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    const double delta = trace[i].next_support_log_likelihood - trace[i].log_likelihood;
    worst = std::min(worst, delta);
    if (delta < -1e-9) drops += " " + std::to_string(i) + ":" + Fmt("%.3g", delta);
  }
  const double ppl0 = trace.front().train_ppl, ppl13 = trace.back().train_ppl;
  const bool frozen_ok = worst >= -1e-9;
  const bool live_ok = ppl13 < ppl0;
  std::string detail = "frozen-support min dLL " + Fmt("%.3g", worst) +
                       (drops.empty() ? "" : " (drops at" + drops + ")") + "; live PPL " +
                       Fmt("%.4f", ppl0) + " -> " + Fmt("%.4f", ppl13) +
                       (live_ok ? " ok" : " NOT lower");
  return {frozen_ok && live_ok, detail};
}

double StandalonePpl(const StructuredLm& model, const std::vector<IndexedSentence>& test) {
  return MixturePerplexity(ComputeComponentProbs(nullptr, &model, test, BeamOptions{}, Threads()),
                           0.0);
}

Outcome MismatchRecovery(const Pipeline& p) {
  const double mis0 = StandalonePpl(p.mismatched.initial, p.setup.test);
  const double mis13 = StandalonePpl(p.mismatched.trained, p.setup.test);
  const double match13 = StandalonePpl(p.matched.trained, p.setup.test);
  const double rel = std::abs(mis13 - match13) / match13;
  return {rel <= 0.10, "held-out PPL mismatched " + Fmt("%.4g", mis0) + " -> " +
                           Fmt("%.4f", mis13) + ", matched " + Fmt("%.4f", match13) +
                           ", rel gap " + Fmt("%.1f%%", 100 * rel) + " (training PPL " +
                           Fmt("%.4f", p.mismatched.trace.back().train_ppl) + " vs " +
                           Fmt("%.4f", p.matched.trace.back().train_ppl) + ")"};
}

Outcome Interpolation(const Pipeline& p) {
  const StructuredLm* models[] = {&p.matched.initial, &p.matched.trained, &p.mismatched.initial,
                                  &p.mismatched.trained};
  bool same = true, bounded = true;
  double first = 0.0;
  std::string cells;
  for (size_t i = 0; i < 4; ++i) {
    const ComponentProbs probs =
        ComputeComponentProbs(&p.trigram, models[i], p.setup.test, BeamOptions{}, Threads());
    const double l0 = MixturePerplexity(probs, 0.0);
    const double l6 = MixturePerplexity(probs, 0.6);
    const double l1 = MixturePerplexity(probs, 1.0);
    if (i == 0) first = l1;
    same = same && l1 == first;
    bounded = bounded && l6 <= std::max(l0, l1);
    cells += (i ? "; " : "") + Fmt("%.4g", l0) + "/" + Fmt("%.4f", l6) + "/" + Fmt("%.6f", l1);
  }
  return {same && bounded, std::string("lambda=1 ") + (same ? "identical" : "DIFFERS") +
                               ", lambda=0.6 " + (bounded ? "bounded" : "NOT bounded") +
                               " (0/0.6/1: " + cells + ")"};
}

Outcome ParameterCounts(const Pipeline& p) {
  const auto& initial = p.matched.initial;
  const auto derivations = slm_test::TreebankDerivations(p.setup.treebank, initial.vocab());
  size_t bad = 0;
  std::string cells;
  for (int c = 0; c < kNumComponents; ++c) {
    const auto comp = static_cast<Component>(c);
    const size_t got0 = CountParameters(initial.component(comp));
    const size_t want0 = slm_test::TallyDistinctEvents(derivations, initial.vocab(), initial.mode(),
                                                       comp, CanonicalSchema(comp));
    const size_t got13 = CountParameters(p.matched.trained.component(comp));
    const size_t want13 =
        slm_test::TallyDistinctEvents(p.matched.last_support, p.matched.trained.vocab(),
                                      p.matched.trained.mode(), comp, CanonicalSchema(comp));
    bad += (got0 != want0) + (got13 != want13);
    cells += std::string(c ? " " : "") + std::to_string(got0) + "->" + std::to_string(got13);
  }
  return {bad == 0, "predictor/tagger/parser " + cells + "; mismatches " + std::to_string(bad)};
}

// ---- 7 ----

Sentence SplitWords(const std::string& text) {
  std::istringstream in(text);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

NBestHypothesis Hyp(const std::string& words, double acoustic, double lm, int rank) {
  NBestHypothesis h;
  h.words = SplitWords(words);
  h.acoustic = acoustic;
  h.lm = lm;
  h.rank = rank;
  return h;
}

Outcome WerMachinery(const Pipeline& p) {
  // Hand fixtures.
  std::vector<NBestList> lists(2);
  lists[0].id = "h1";
  lists[0].reference = SplitWords("show me flights to boston");
  lists[0].hypotheses = {Hyp("show me flight to boston", -10, -8, 1),
                         Hyp("show me flights to boston", -11, -7.5, 2),
                         Hyp("show flights boston", -12, -6, 3)};
  lists[1].id = "h2";
  lists[1].reference = SplitWords("list fares");
  lists[1].hypotheses = {Hyp("list the fares", -5, -4, 1), Hyp("fares", -6, -3, 2)};
  bool hand = true;
  // h1 rank 1: 1 substitution over 5; h2 rank 1: 1 insertion over 2.
  const EditCounts first = ComputeWer(Selections(lists, {0, 0}), References(lists));
  hand = hand && first.substitutions == 1 && first.insertions == 1 && first.deletions == 0 &&
         first.reference_words == 7;
  // Oracle: h1 rank 2 exact; h2 both have 1 error.
  const EditCounts oracle = OracleWer(lists);
  hand = hand && oracle.errors() == 1 && oracle.reference_words == 7;
  // "show flights boston" vs reference: 2 deletions.
  const EditCounts third = Align(lists[0].hypotheses[2].words, lists[0].reference);
  hand = hand && third.deletions == 2 && third.errors() == 2;
  RescoreWeights lm_only;
  lm_only.acoustic_scale = 0.0;
  hand = hand && Rescore(lists[0], {-8, -7.5, -6}, lm_only) == 2;

  // Randomized fixtures scored by the trained model and the trigram.
  const auto lex = slm_test::TravelLexicon();
  const auto vocab_words = slm_test::LexiconWords(lex);
  int oracle_violations = 0, worse_than_first = 0;
  double total_first = 0, total_rescored = 0, total_oracle = 0;
  for (int f = 0; f < 100; ++f) {
    const auto refs = slm_test::Yields(slm_test::GenerateTreebank(lex, 3, 7000 + f));
    const auto fixture = slm_test::GenerateNBest(refs, vocab_words, 5, 8000 + f);
    const NBestScores scores(fixture, &p.matched.trained, &p.trigram, nullptr, BeamOptions{},
                             Threads());
    const auto chosen = scores.Select(0.6, RescoreWeights{});
    const double rescored =
        ComputeWer(Selections(fixture, chosen), References(fixture)).rate();
    const double one_best =
        ComputeWer(Selections(fixture, std::vector<size_t>(fixture.size(), 0)), References(fixture))
            .rate();
    const double best = OracleWer(fixture).rate();
    oracle_violations += best > rescored;
    worse_than_first += rescored > one_best;
    total_first += one_best;
    total_rescored += rescored;
    total_oracle += best;
  }
  const bool pass = hand && oracle_violations == 0 && worse_than_first == 0;
  return {pass, std::string("hand fixtures ") + (hand ? "exact" : "WRONG") +
                    "; 100 fixtures: oracle<=rescored violated " +
                    std::to_string(oracle_violations) + ", rescored<=1-best violated " +
                    std::to_string(worse_than_first) + " (mean WER 1-best " +
                    Fmt("%.1f%%", total_first) + ", rescored " + Fmt("%.1f%%", total_rescored) +
                    ", oracle " + Fmt("%.1f%%", total_oracle) + ")"};
}

// ---- 9 ----

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool RunPipeline(const std::string& cli, const fs::path& data, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = data.string(), o = dir.string();
  const std::vector<std::string> steps = {
      "init --parses " + d + "/treebank.txt --vocab " + d + "/vocab.txt --headrules " + d +
          "/headrules.txt --out " + o + "/m0.slm",
      "trigram --text " + d + "/train.txt --vocab " + d + "/vocab.txt --out " + o + "/t.tri",
      "train --model " + o + "/m0.slm --text " + d + "/train.txt --iters 3 --out " + o +
          "/m3.slm --metrics " + o + "/metrics.tsv",
      "ppl --model " + o + "/m0.slm --model " + o + "/m3.slm --trigram " + o + "/t.tri --text " +
          d + "/test.txt",
      "rescore --model " + o + "/m3.slm --trigram " + o + "/t.tri --nbest " + d +
          "/nbest.txt --selections " + o + "/selections.txt",
      "parse --model " + o + "/m3.slm --text " + d + "/test.txt --out " + o + "/parses.txt",
      "wer --hyp " + o + "/selections.txt --ref " + d + "/refs.txt",
  };
  for (size_t i = 0; i < steps.size(); ++i) {
    const std::string cmd = "\"" + cli + "\" -q " + steps[i] + " >> \"" + o +
                            "/report.txt\" 2>> \"" + o + "/stderr.txt\"";
    if (std::system(cmd.c_str()) != 0) return false;
  }
  return true;
}

Outcome Determinism(const std::string& cli, const fs::path& data, const fs::path& work) {
  if (cli.empty()) return {false, "no --cli binary given"};
  const fs::path a = work / "run_a", b = work / "run_b";
  if (!RunPipeline(cli, data, a) || !RunPipeline(cli, data, b))
    return {false, "pipeline command failed; see " + (work / "run_*/stderr.txt").string()};
  size_t files = 0;
  std::string differ;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path name = entry.path().filename();
    ++files;
    if (Slurp(a / name) != Slurp(b / name)) differ += " " + name.string();
  }
  return {differ.empty() && files > 0,
          std::to_string(files) + " files compared" + (differ.empty() ? ", identical" : "; differ:" + differ)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path data = "data", work = fs::temp_directory_path() / "slm_acceptance";
  bool report_only = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (arg == "--data" && i + 1 < argc) {
      data = argv[++i];
    } else if (arg == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else if (arg == "--report-only") {
      report_only = true;
    } else {
      std::cerr << "usage: slm_acceptance [--cli <slm>] [--data <dir>] [--work <dir>] "
                   "[--report-only]\n";
      return 2;
    }
  }
  SetWarningsEnabled(false);

  int failed = 0, crashed = 0;
  auto report = [&](int n, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++crashed;
    }
    failed += !o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << Fmt("%.1f", Seconds(start)) << " s]" << std::endl;
  };

  report(1, TrigramEquivalence);
  report(2, ProperProbability);
  report(3, ExhaustiveOracle);

  std::unique_ptr<Pipeline> pipeline;
  const auto start = std::chrono::steady_clock::now();
  try {
    pipeline = std::make_unique<Pipeline>(BuildPipeline());
  } catch (const std::exception& e) {
    std::cout << "pipeline error: " << e.what() << std::endl;
  }
  std::cout << "(500-sentence EM pipeline: " << Fmt("%.1f", Seconds(start)) << " s)" << std::endl;
  auto with_pipeline = [&](Outcome (*fn)(const Pipeline&)) {
    return [&pipeline, fn]() -> Outcome {
      if (!pipeline) throw std::runtime_error("pipeline unavailable");
      return fn(*pipeline);
    };
  };
  report(4, with_pipeline(Monotonicity));
  report(5, with_pipeline(MismatchRecovery));
  report(6, with_pipeline(Interpolation));
  report(7, with_pipeline(WerMachinery));
  report(8, with_pipeline(ParameterCounts));
  report(9, [&] { return Determinism(cli, data, work); });

  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  if (report_only) return crashed == 0 && pipeline ? 0 : 1;
  return failed == 0 ? 0 : 1;
}
