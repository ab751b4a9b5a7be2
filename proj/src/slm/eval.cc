#include "slm/eval.h"

#include <cmath>
#include <limits>

#include "slm/error.h"
#include "slm/parallel.h"
#include "slm/text_io.h"

namespace slm {

PerplexityResult PerplexityFromProbs(const std::vector<std::vector<double>>& probs,
                                     const std::vector<IndexedSentence>* sentences,
                                     const Vocabulary* vocab) {
  PerplexityResult r;
  for (size_t i = 0; i < probs.size(); ++i) {
    for (size_t k = 0; k < probs[i].size(); ++k) {
      const double p = probs[i][k];
      if (!(p > 0.0)) {
        std::string token;
        if (sentences && vocab && i < sentences->size()) {
          const auto& s = (*sentences)[i];
          const WordId w = k < s.size() ? s[k] : Vocabulary::kEos;
          token = " '" + vocab->WordString(w) + "'";
        }
        throw Error(ErrorCode::kZeroProbability, "zero probability for token" + token +
                                                     " (sentence " + std::to_string(i + 1) +
                                                     ", position " + std::to_string(k + 1) + ")");
      }
      r.log_prob += std::log(p);
      ++r.tokens;
    }
  }
  if (r.tokens == 0) throw Error(ErrorCode::kInvalidArgument, "no tokens to evaluate");
  r.perplexity = std::exp(-r.log_prob / static_cast<double>(r.tokens));
  return r;
}

PerplexityResult Perplexity(const SentenceScorer& lm,
                            const std::vector<IndexedSentence>& sentences,
                            const Vocabulary* vocab, int threads) {
  std::vector<std::vector<double>> probs(sentences.size());
  ParallelFor(sentences.size(), threads, [&](size_t i) {
    probs[i] = lm(sentences[i]);
    if (probs[i].size() != sentences[i].size() + 1)
      throw Error(ErrorCode::kInternal, "scorer returned the wrong number of probabilities");
  });
  return PerplexityFromProbs(probs, &sentences, vocab);
}

namespace {

[[noreturn]] void NBestFail(const std::string& message, size_t line) {
  throw ParseError("n-best: " + message, line, "line");
}

}  // namespace

std::vector<NBestList> ReadNBest(std::istream& in) {
  std::vector<NBestList> lists;
  LineReader reader(in);
  std::string line;
  NBestList* current = nullptr;
  while (reader.Next(&line)) {
    auto tokens = SplitWhitespace(line);
    if (tokens.empty()) {
      current = nullptr;
      continue;
    }
    if (current == nullptr) {
      if (tokens.size() < 3 || tokens[0] != "UTT" || tokens[2] != "REF")
        NBestFail("expected 'UTT <id> REF <words>'", reader.line_number());
      for (const auto& l : lists) {
        if (l.id == tokens[1]) NBestFail("duplicate utterance '" + tokens[1] + "'", reader.line_number());
      }
      lists.emplace_back();
      current = &lists.back();
      current->id = tokens[1];
      current->reference.assign(tokens.begin() + 3, tokens.end());
      continue;
    }
    if (tokens.size() < 2) NBestFail("expected '<acoustic> <lm> <words>'", reader.line_number());
    NBestHypothesis h;
    h.acoustic = ParseDouble(tokens[0], reader.line_number());
    h.lm = ParseDouble(tokens[1], reader.line_number());
    if (!std::isfinite(h.acoustic) || !std::isfinite(h.lm))
      NBestFail("scores must be finite", reader.line_number());
    h.words.assign(tokens.begin() + 2, tokens.end());
    h.rank = static_cast<int>(current->hypotheses.size()) + 1;
    current->hypotheses.push_back(std::move(h));
  }
  for (const auto& l : lists) {
    if (l.hypotheses.empty())
      throw Error(ErrorCode::kFormat, "n-best: utterance '" + l.id + "' has no hypotheses");
  }
  return lists;
}

std::vector<NBestList> ReadNBestFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadNBest(in);
}

namespace {

void WriteWords(std::ostream& out, const Sentence& words) {
  for (const auto& w : words) out << ' ' << w;
}

}  // namespace

void WriteNBest(std::ostream& out, const std::vector<NBestList>& lists) {
  for (size_t i = 0; i < lists.size(); ++i) {
    if (i > 0) out << '\n';
    out << "UTT " << lists[i].id << " REF";
    WriteWords(out, lists[i].reference);
    out << '\n';
    for (const auto& h : lists[i].hypotheses) {
      out << FormatDouble(h.acoustic) << ' ' << FormatDouble(h.lm);
      WriteWords(out, h.words);
      out << '\n';
    }
  }
}

size_t Rescore(const NBestList& list, const std::vector<double>& lm_log_probs,
               const RescoreWeights& weights) {
  if (list.hypotheses.empty()) throw Error(ErrorCode::kInvalidArgument, "empty n-best list");
  if (lm_log_probs.size() != list.hypotheses.size())
    throw Error(ErrorCode::kInvalidArgument, "one LM score per hypothesis is required");
  size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < list.hypotheses.size(); ++i) {
    const auto& h = list.hypotheses[i];
    const double score = weights.acoustic_scale * h.acoustic + weights.lm_scale * lm_log_probs[i] +
                         weights.word_insertion_penalty * static_cast<double>(h.words.size());
    const bool better = i == 0 || score > best_score ||
                        (score == best_score && h.rank < list.hypotheses[best].rank);
    if (better) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

double EditCounts::rate() const {
  if (reference_words == 0)
    return errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(errors()) / static_cast<double>(reference_words);
}

EditCounts& EditCounts::operator+=(const EditCounts& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  reference_words += other.reference_words;
  return *this;
}

EditCounts Align(const Sentence& hypothesis, const Sentence& reference) {
  const size_t n = reference.size();
  const size_t m = hypothesis.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t diag = d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  EditCounts c;
  c.reference_words = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = reference[i - 1] == hypothesis[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (match ? 0 : 1)) {
        if (!match) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

EditCounts ComputeWer(const std::map<std::string, Sentence>& hypotheses,
                      const std::map<std::string, Sentence>& references) {
  EditCounts total;
  for (const auto& [id, words] : hypotheses) {
    auto it = references.find(id);
    if (it == references.end())
      throw Error(ErrorCode::kMissingReference, "no reference for utterance '" + id + "'");
    total += Align(words, it->second);
  }
  return total;
}

EditCounts OracleWer(const std::vector<NBestList>& lists,
                     const std::map<std::string, Sentence>* references) {
  EditCounts total;
  for (const auto& list : lists) {
    const Sentence* ref = &list.reference;
    if (references) {
      auto it = references->find(list.id);
      if (it == references->end())
        throw Error(ErrorCode::kMissingReference, "no reference for utterance '" + list.id + "'");
      ref = &it->second;
    }
    if (list.hypotheses.empty())
      throw Error(ErrorCode::kInvalidArgument, "empty n-best list '" + list.id + "'");
    EditCounts best;
    for (size_t i = 0; i < list.hypotheses.size(); ++i) {
      EditCounts c = Align(list.hypotheses[i].words, *ref);
      if (i == 0 || c.errors() < best.errors()) best = c;
    }
    total += best;
  }
  return total;
}

std::map<std::string, Sentence> ReadTranscripts(std::istream& in) {
  std::map<std::string, Sentence> out;
  LineReader reader(in);
  std::string line;
  while (reader.Next(&line)) {
    auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    Sentence words(tokens.begin() + 1, tokens.end());
    if (!out.emplace(tokens[0], std::move(words)).second)
      throw ParseError("duplicate utterance '" + tokens[0] + "'", reader.line_number(), "line");
  }
  return out;
}

std::map<std::string, Sentence> ReadTranscriptFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadTranscripts(in);
}

void WriteTranscripts(std::ostream& out, const std::map<std::string, Sentence>& transcripts) {
  for (const auto& [id, words] : transcripts) {
    out << id;
    WriteWords(out, words);
    out << '\n';
  }
}

}  // namespace slm
