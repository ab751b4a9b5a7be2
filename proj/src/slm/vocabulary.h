#ifndef SLM_VOCABULARY_H_
#define SLM_VOCABULARY_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace slm {

class LineReader;

using WordId = int32_t;
// Tags and non-terminal labels share one index space: tags occupy
// [0, num_tags), labels occupy [num_tags, num_tags + num_labels).
using CategoryId = int32_t;

// Placeholder for a missing context field (e.g. h_{-1} when only <s> is on
// the stack, or w_{-2} at the start of a sentence).
inline constexpr int32_t kNoSymbol = -1;

inline constexpr std::string_view kSentenceBegin = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr std::string_view kSentenceBeginTag = "SB";
inline constexpr std::string_view kSentenceEndTag = "SE";
inline constexpr std::string_view kRootLabel = "TOP";

// Dense, insertion-ordered string <-> index map.
class SymbolTable {
 public:
  int32_t Add(std::string_view symbol);
  // Returns kNoSymbol when absent.
  int32_t Find(std::string_view symbol) const;
  const std::string& Symbol(int32_t id) const { return symbols_.at(id); }
  int32_t size() const { return static_cast<int32_t>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  bool operator==(const SymbolTable& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int32_t> index_;
};

// Word, tag and label inventories. The three sentence markers always hold
// word ids 0 (<s>), 1 (</s>) and 2 (<unk>).
//
// When tags (labels) are collapsed, every tag (label) string maps to the
// single tag (label) type; this is the degenerate configuration in which
// the structured model reduces to a trigram.
class Vocabulary {
 public:
  static constexpr WordId kBos = 0;
  static constexpr WordId kEos = 1;
  static constexpr WordId kUnk = 2;

  Vocabulary();

  WordId AddWord(std::string_view word);
  // Out-of-vocabulary words map to kUnk.
  WordId Word(std::string_view word) const;
  bool HasWord(std::string_view word) const;
  const std::string& WordString(WordId id) const { return words_.Symbol(id); }
  int32_t num_words() const { return words_.size(); }

  CategoryId AddTag(std::string_view tag);
  CategoryId AddLabel(std::string_view label);
  // Returns kNoSymbol for unknown tags/labels (never when collapsed).
  CategoryId Tag(std::string_view tag) const;
  CategoryId Label(std::string_view label) const;
  int32_t num_tags() const { return tags_.size(); }
  int32_t num_labels() const { return labels_.size(); }
  int32_t num_categories() const { return num_tags() + num_labels(); }
  bool IsTag(CategoryId c) const { return c >= 0 && c < num_tags(); }
  bool IsLabel(CategoryId c) const {
    return c >= num_tags() && c < num_categories();
  }
  // 0-based index among labels for a label category.
  int32_t LabelIndex(CategoryId c) const { return c - num_tags(); }
  CategoryId LabelCategory(int32_t label_index) const {
    return num_tags() + label_index;
  }
  const std::string& CategoryString(CategoryId c) const;

  // Category of the exposed head for <s>: the "SB" tag when present,
  // otherwise the first tag.
  CategoryId SentenceBeginCategory() const;

  // Label index of the completion label, or kNoSymbol when labels are
  // collapsed or it is absent.
  int32_t RootLabel() const;

  void CollapseTags(std::string_view name = "X");
  void CollapseLabels(std::string_view name = "XP");
  bool tags_collapsed() const { return tags_collapsed_; }
  bool labels_collapsed() const { return labels_collapsed_; }

  const SymbolTable& words() const { return words_; }
  const SymbolTable& tags() const { return tags_; }
  const SymbolTable& labels() const { return labels_; }

  // Word inventory equality (the property shared sub-models must agree on).
  bool SameWords(const Vocabulary& other) const {
    return words_ == other.words_;
  }
  bool operator==(const Vocabulary& other) const;

  // Vocabulary file: one token per line, '#' lines ignored. Markers may be
  // declared with their reserved names; they are always present.
  static Vocabulary ReadWordFile(std::istream& in);
  static Vocabulary ReadWordFile(const std::string& path);

  // Section of the model-file container.
  void Write(std::ostream& out) const;
  static Vocabulary Read(LineReader& reader);

 private:
  SymbolTable words_;
  SymbolTable tags_;
  SymbolTable labels_;
  bool tags_collapsed_ = false;
  bool labels_collapsed_ = false;
};

}  // namespace slm

#endif  // SLM_VOCABULARY_H_
