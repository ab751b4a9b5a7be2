// Writes the small synthetic corpus shipped under data/.
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "slm/eval.h"
#include "slm/text_io.h"
#include "slm/treebank.h"
#include "synthetic.h"

namespace {

// Joins "<a> <b>" into a contraction so the rewrite table has work to do.
const std::vector<std::pair<std::string, std::vector<std::string>>> kContractions = {
    {"i'd", {"i", "would"}}, {"we'll", {"we", "will"}}, {"you'll", {"you", "will"}}};

std::string Contract(const slm::Sentence& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    std::string token = words[i];
    if (i + 1 < words.size()) {
      for (const auto& [joined, parts] : kContractions) {
        if (words[i] == parts[0] && words[i + 1] == parts[1]) {
          token = joined;
          ++i;
          break;
        }
      }
    }
    out += (out.empty() ? "" : " ") + token;
  }
  return out;
}

void WriteTrees(const std::string& path, const std::vector<slm::BracketedTree>& trees) {
  auto out = slm::OpenOutput(path);
  for (const auto& t : trees) out << slm::Serialize(t) << '\n';
}

void WriteText(const std::string& path, const std::vector<slm::Sentence>& sentences) {
  auto out = slm::OpenOutput(path);
  for (const auto& s : sentences) out << Contract(s) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_data <output-dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  const auto travel = slm_test::TravelLexicon();

  WriteTrees(dir + "/treebank.txt", slm_test::GenerateTreebank(travel, 50, 11));
  WriteTrees(dir + "/finance_treebank.txt",
             slm_test::GenerateTreebank(slm_test::FinanceLexicon(), 50, 12));
  WriteText(dir + "/train.txt", slm_test::Yields(slm_test::GenerateTreebank(travel, 50, 289)));
  const auto test = slm_test::Yields(slm_test::GenerateTreebank(travel, 30, 184));
  WriteText(dir + "/test.txt", test);

  {
    auto out = slm::OpenOutput(dir + "/vocab.txt");
    for (const auto& w : slm_test::LexiconWords(travel)) out << w << '\n';
  }
  {
    auto out = slm::OpenOutput(dir + "/retok.tsv");
    for (const auto& [joined, parts] : kContractions)
      out << joined << '\t' << parts[0] << ' ' << parts[1] << '\n';
  }
  {
    auto out = slm::OpenOutput(dir + "/headrules.txt");
    out << slm::HeadRules::DefaultText();
  }
  const auto lists =
      slm_test::GenerateNBest(test, slm_test::LexiconWords(travel), 10, 15);
  {
    auto out = slm::OpenOutput(dir + "/nbest.txt");
    slm::WriteNBest(out, lists);
  }
  {
    std::map<std::string, slm::Sentence> refs;
    for (const auto& l : lists) refs[l.id] = l.reference;
    auto out = slm::OpenOutput(dir + "/refs.txt");
    slm::WriteTranscripts(out, refs);
  }
  return 0;
}
