#ifndef SLM_TREEBANK_H_
#define SLM_TREEBANK_H_

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace slm {

// Penn-Treebank-style tree as read from a parse file. Leaves carry a
// (tag, word) pair; internal nodes carry a non-terminal label and at least
// one child.
struct BracketedTree {
  std::string label;  // non-terminal, or the POS tag at a leaf
  std::string word;   // leaves only
  std::vector<BracketedTree> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const BracketedTree&) const = default;
};

// Reads one tree. Throws ParseError (with character offset) on unbalanced
// parentheses, empty nodes, leaves with other than two atoms, or trailing
// input. A root without a label, "( (S ...) )", gets the empty label.
BracketedTree ParseBracketed(std::string_view text);

// Canonical form: single spaces, no newlines.
std::string Serialize(const BracketedTree& tree);

// Ingestion cleanup: removes -NONE- (trace) leaves and nodes left empty,
// strips function tags and indices ("NP-SBJ-1" -> "NP").
BracketedTree StripAnnotations(const BracketedTree& tree);

std::vector<std::string> Yield(const BracketedTree& tree);

// One bracketed tree per non-blank line.
std::vector<BracketedTree> ReadParseFile(std::istream& in);
std::vector<BracketedTree> ReadParseFile(const std::string& path);

enum class SearchDirection { kLeftToRight, kRightToLeft };

// Per-label head-selection rules: a search direction plus a priority list
// of child labels/tags. File format, one rule per line:
//   LABEL direction child1 child2 ...
// with direction "left" (left-to-right) or "right" (right-to-left). A rule
// for label "*" applies to labels without their own rule.
class HeadRules {
 public:
  struct Rule {
    SearchDirection direction = SearchDirection::kLeftToRight;
    std::vector<std::string> priorities;
  };

  void Set(std::string label, Rule rule) { rules_[std::move(label)] = std::move(rule); }
  const Rule& Find(const std::string& label) const;

  static HeadRules Parse(std::istream& in);
  static HeadRules ReadFile(const std::string& path);
  // Collins/Magerman-style table for Penn Treebank labels.
  static HeadRules Default();
  static const char* DefaultText();

 private:
  std::map<std::string, Rule> rules_;
  Rule fallback_;
};

struct Head {
  std::string word;
  std::string category;  // label of the selected child, or the tag at a leaf
  bool operator==(const Head&) const = default;
};

struct HeadTree {
  std::string label;
  std::string word;  // leaves only
  Head head;
  int head_child = -1;  // index into children; -1 at leaves
  std::vector<HeadTree> children;

  bool is_leaf() const { return children.empty(); }
};

HeadTree PercolateHeadwords(const BracketedTree& tree, const HeadRules& rules);

// Binary tree with headword annotation. Internal nodes have exactly two
// children; head_is_left says which child supplies the headword.
struct BinarizedTree {
  std::string label;  // non-terminal, or the tag at a leaf
  std::string word;   // leaves only
  Head head;
  bool head_is_left = true;
  std::vector<BinarizedTree> children;  // empty or exactly two

  bool is_leaf() const { return children.empty(); }
  const BinarizedTree& left() const { return children.at(0); }
  const BinarizedTree& right() const { return children.at(1); }
  const BinarizedTree& head_child() const { return head_is_left ? left() : right(); }
  bool operator==(const BinarizedTree&) const = default;
};

// The head child absorbs right siblings first, then left siblings, one at a
// time; every intermediate node keeps the parent label and head. Unary
// nodes are collapsed onto their child.
BinarizedTree Binarize(const HeadTree& tree);

std::vector<std::string> Yield(const BinarizedTree& tree);
std::string Serialize(const BinarizedTree& tree);

// Checks binary arity and that every node's headword is its head child's.
bool CheckBinarized(const BinarizedTree& tree, std::string* why = nullptr);

}  // namespace slm

#endif  // SLM_TREEBANK_H_
