#include "slm/text.h"

#include "slm/error.h"
#include "slm/text_io.h"

namespace slm {

const std::vector<std::string>* RewriteTable::Find(const std::string& token) const {
  auto it = rules_.find(token);
  return it == rules_.end() ? nullptr : &it->second;
}

RewriteTable RewriteTable::Parse(std::istream& in) {
  RewriteTable table;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("rewrite rule needs a TAB between token and replacement",
                       line_number, "line");
    std::string token = line.substr(0, tab);
    auto replacement = SplitWhitespace(std::string_view(line).substr(tab + 1));
    if (token.empty() || replacement.empty())
      throw ParseError("empty rewrite rule", line_number, "line");
    table.Add(std::move(token), std::move(replacement));
  }
  return table;
}

RewriteTable RewriteTable::ReadFile(const std::string& path) {
  auto in = OpenInput(path);
  return Parse(in);
}

Sentence Retokenize(const Sentence& sentence, const RewriteTable& rules) {
  Sentence out;
  out.reserve(sentence.size());
  for (const auto& token : sentence) {
    if (const auto* rewrite = rules.Find(token)) {
      out.insert(out.end(), rewrite->begin(), rewrite->end());
    } else {
      out.push_back(token);
    }
  }
  return out;
}

IndexedSentence MapToVocabulary(const Sentence& sentence, const Vocabulary& vocab) {
  IndexedSentence out;
  out.reserve(sentence.size());
  for (const auto& word : sentence) out.push_back(vocab.Word(word));
  return out;
}

double OovRate(const std::vector<IndexedSentence>& sentences) {
  size_t total = 0, unknown = 0;
  for (const auto& s : sentences) {
    total += s.size();
    for (WordId w : s) unknown += (w == Vocabulary::kUnk);
  }
  return total == 0 ? 0.0 : static_cast<double>(unknown) / static_cast<double>(total);
}

std::vector<Sentence> ReadSentences(std::istream& in) {
  std::vector<Sentence> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = SplitWhitespace(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

std::vector<Sentence> ReadSentences(const std::string& path) {
  auto in = OpenInput(path);
  return ReadSentences(in);
}

}  // namespace slm
