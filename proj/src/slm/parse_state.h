#ifndef SLM_PARSE_STATE_H_
#define SLM_PARSE_STATE_H_

#include <compare>
#include <memory>
#include <string>
#include <vector>

#include "slm/treebank.h"
#include "slm/vocabulary.h"

namespace slm {

// (headword, tag-or-label) pair of a root fragment in a partial parse.
struct ExposedHead {
  WordId word = kNoSymbol;
  CategoryId category = kNoSymbol;
  bool operator==(const ExposedHead&) const = default;
  auto operator<=>(const ExposedHead&) const = default;
};

struct ParserAction {
  enum class Kind : int8_t { kNull = 0, kAdjoinLeft = 1, kAdjoinRight = 2 };
  Kind kind = Kind::kNull;
  int32_t label = 0;  // index among labels (not a category id); adjoins only

  static ParserAction Null() { return {}; }
  static ParserAction AdjoinLeft(int32_t label) { return {Kind::kAdjoinLeft, label}; }
  static ParserAction AdjoinRight(int32_t label) { return {Kind::kAdjoinRight, label}; }

  bool is_null() const { return kind == Kind::kNull; }
  // Dense outcome id for the parser component: 0 = null, then
  // (left, right) pairs per label.
  int32_t Code() const;
  static ParserAction FromCode(int32_t code);
  static int32_t NumCodes(int32_t num_labels) { return 1 + 2 * num_labels; }

  bool operator==(const ParserAction&) const = default;
  auto operator<=>(const ParserAction&) const = default;
};

std::string ToString(const ParserAction& action, const Vocabulary& vocab);

// How the parser may act. kNullOnly forces null until the sentence end and
// then a fixed completion (adjoin-left under the first label); every forced
// action has probability one.
enum class ParserMode { kFull, kNullOnly };

// Immutable, shareable binary parse node.
struct ParseNode {
  ExposedHead head;  // leaves: (word, tag); internal: (headword, label)
  bool head_is_left = true;
  std::shared_ptr<const ParseNode> left;
  std::shared_ptr<const ParseNode> right;

  bool is_leaf() const { return left == nullptr; }
};
using ParseTreePtr = std::shared_ptr<const ParseNode>;

ParseTreePtr MakeLeaf(WordId word, CategoryId tag);
ParseTreePtr MakeInternal(ParseTreePtr left, ParseTreePtr right, bool head_is_left,
                          CategoryId label);
bool SameTree(const ParseNode* a, const ParseNode* b);
std::vector<WordId> Yield(const ParseNode& tree);
// Drops every </s> leaf; its parent is replaced by the other child. Null
// when nothing remains.
ParseTreePtr StripSentenceEnd(const ParseTreePtr& tree);
// Plain bracketed form, readable by ParseBracketed.
std::string FormatTree(const ParseNode& tree, const Vocabulary& vocab);

// Words map through the vocabulary (OOV -> <unk>); unknown tags or labels
// are a vocabulary mismatch.
ParseTreePtr ToParseTree(const BinarizedTree& tree, const Vocabulary& vocab);

// Parser moves made at one word position: the word, its tag, and the parser
// actions p_1..p_N ending in null.
struct PositionRecord {
  WordId word = kNoSymbol;
  CategoryId tag = kNoSymbol;
  std::vector<ParserAction> actions;
  bool operator==(const PositionRecord&) const = default;
  auto operator<=>(const PositionRecord&) const = default;
};

struct ParseDerivation {
  std::vector<PositionRecord> positions;
  bool operator==(const ParseDerivation&) const = default;
  auto operator<=>(const ParseDerivation&) const = default;
};

std::string ToString(const ParseDerivation& derivation, const Vocabulary& vocab);

// Word-parse k-prefix: the words so far, the forest of partial parses and
// its exposed heads (heads[0] is always <s>).
struct WordParsePrefix {
  std::vector<ExposedHead> heads;
  std::vector<ParseTreePtr> fragments;  // aligned with heads
  std::vector<WordId> words;            // w_0 = <s>, ..., w_k
  std::vector<CategoryId> tags;         // t_1, ..., t_k
  ParseDerivation derivation;
  double logprob = 0.0;                 // log P(W_k T_k)
  bool closed = true;                   // current position ended with null

  static WordParsePrefix Initial(const Vocabulary& vocab);

  // Number of fragments above <s>.
  int open_fragments() const { return static_cast<int>(heads.size()) - 1; }
  bool at_sentence_end() const { return words.back() == Vocabulary::kEos; }
  // Closed at sentence end with a single constituent above <s>.
  bool complete() const { return closed && at_sentence_end() && open_fragments() == 1; }
  const ExposedHead& h0() const { return heads.back(); }
  // h_{-1}, or a (kNoSymbol, kNoSymbol) placeholder when absent.
  ExposedHead h1() const;
};

// Mid-sentence: null is always legal, adjoins need two fragments above <s>.
// At sentence end: only adjoins until one constituent remains, then only null.
// With a root label, it is reserved for the last sentence-end adjoin, which
// is then forced to adjoin-left(root).
std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, bool at_sentence_end,
                                       int32_t num_labels, ParserMode mode,
                                       int32_t root_label = kNoSymbol);
std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, int32_t num_labels,
                                       ParserMode mode, int32_t root_label = kNoSymbol);
std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, const Vocabulary& vocab,
                                       ParserMode mode);
bool IsLegal(const WordParsePrefix& prefix, const ParserAction& action, const Vocabulary& vocab,
             ParserMode mode);

// Throws Error(kIllegalAction) with the reason.
WordParsePrefix ApplyAction(const WordParsePrefix& prefix, const ParserAction& action,
                            const Vocabulary& vocab, ParserMode mode);
// Requires the previous position to be closed by null.
WordParsePrefix ShiftWord(const WordParsePrefix& prefix, WordId word, CategoryId tag);

// Rebuilds the prefix from a derivation; throws Error(kInvalidDerivation).
WordParsePrefix Replay(const ParseDerivation& derivation, const Vocabulary& vocab,
                       ParserMode mode);

}  // namespace slm

#endif  // SLM_PARSE_STATE_H_
