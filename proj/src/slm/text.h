#ifndef SLM_TEXT_H_
#define SLM_TEXT_H_

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "slm/vocabulary.h"

namespace slm {

using Sentence = std::vector<std::string>;
using IndexedSentence = std::vector<WordId>;

// Token rewrite table, e.g. "don't" -> "do n't". File format: one rule per
// line, token TAB space-separated replacement.
class RewriteTable {
 public:
  void Add(std::string token, std::vector<std::string> replacement) {
    rules_[std::move(token)] = std::move(replacement);
  }
  const std::vector<std::string>* Find(const std::string& token) const;
  size_t size() const { return rules_.size(); }

  static RewriteTable Parse(std::istream& in);
  static RewriteTable ReadFile(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>> rules_;
};

Sentence Retokenize(const Sentence& sentence, const RewriteTable& rules);

IndexedSentence MapToVocabulary(const Sentence& sentence, const Vocabulary& vocab);

// Fraction of tokens mapped to <unk>; 0 for an empty corpus.
double OovRate(const std::vector<IndexedSentence>& sentences);

// One sentence per line, whitespace-tokenized; blank lines are skipped.
std::vector<Sentence> ReadSentences(std::istream& in);
std::vector<Sentence> ReadSentences(const std::string& path);

}  // namespace slm

#endif  // SLM_TEXT_H_
