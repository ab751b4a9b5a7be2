#include "slm/treebank.h"

#include <cctype>
#include <sstream>

#include "slm/error.h"
#include "slm/text_io.h"

namespace slm {

namespace {

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  BracketedTree ReadTree() {
    SkipSpace();
    if (AtEnd()) throw ParseError("empty input", pos_);
    if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
    BracketedTree tree = ReadNode();
    SkipSpace();
    if (!AtEnd()) throw ParseError("trailing input after tree", pos_);
    return tree;
  }

 private:
  bool AtEnd() const { return pos_ >= text_.size(); }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char Peek() {
    SkipSpace();
    if (AtEnd()) throw ParseError("unbalanced parentheses: unexpected end of input", pos_);
    return text_[pos_];
  }

  std::string ReadAtom() {
    size_t start = pos_;
    while (!AtEnd() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // pos_ is at '('.
  BracketedTree ReadNode() {
    size_t open = pos_++;
    BracketedTree node;
    char c = Peek();
    if (c == ')') throw ParseError("empty node", open);
    if (c != '(') node.label = ReadAtom();
    c = Peek();
    if (c == ')') throw ParseError("leaf with a single atom", open);
    if (c != '(') {
      node.word = ReadAtom();
      c = Peek();
      if (c != ')') throw ParseError("leaf must have exactly two atoms", pos_);
      ++pos_;
      return node;
    }
    while (Peek() == '(') node.children.push_back(ReadNode());
    if (Peek() != ')') throw ParseError("atom after subtrees", pos_);
    ++pos_;
    return node;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

void SerializeTo(const BracketedTree& tree, std::string* out) {
  out->push_back('(');
  out->append(tree.label);
  if (tree.is_leaf()) {
    out->push_back(' ');
    out->append(tree.word);
  } else {
    for (const auto& child : tree.children) {
      if (!out->empty() && out->back() != '(') out->push_back(' ');
      SerializeTo(child, out);
    }
  }
  out->push_back(')');
}

std::string StripFunctionTags(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  size_t cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

// Returns false when the subtree vanishes entirely.
bool Strip(const BracketedTree& in, BracketedTree* out) {
  if (in.is_leaf()) {
    if (in.label == "-NONE-") return false;
    *out = in;
    return true;
  }
  out->label = StripFunctionTags(in.label);
  out->children.clear();
  for (const auto& child : in.children) {
    BracketedTree stripped;
    if (Strip(child, &stripped)) out->children.push_back(std::move(stripped));
  }
  return !out->children.empty();
}

template <typename Tree>
void CollectYield(const Tree& tree, std::vector<std::string>* words) {
  if (tree.is_leaf()) {
    words->push_back(tree.word);
    return;
  }
  for (const auto& child : tree.children) CollectYield(child, words);
}

}  // namespace

BracketedTree ParseBracketed(std::string_view text) {
  return BracketReader(text).ReadTree();
}

std::string Serialize(const BracketedTree& tree) {
  std::string out;
  SerializeTo(tree, &out);
  return out;
}

BracketedTree StripAnnotations(const BracketedTree& tree) {
  BracketedTree out;
  if (!Strip(tree, &out))
    throw Error(ErrorCode::kFormat, "tree has no words after removing traces");
  return out;
}

std::vector<std::string> Yield(const BracketedTree& tree) {
  std::vector<std::string> words;
  CollectYield(tree, &words);
  return words;
}

std::vector<BracketedTree> ReadParseFile(std::istream& in) {
  std::vector<BracketedTree> trees;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (SplitWhitespace(line).empty()) continue;
    try {
      trees.push_back(ParseBracketed(line));
    } catch (const ParseError& e) {
      throw Error(ErrorCode::kFormat,
                  std::string(e.what()) + " (line " + std::to_string(line_number) + ")");
    }
  }
  return trees;
}

std::vector<BracketedTree> ReadParseFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadParseFile(in);
}

// ---------------------------------------------------------------------------
// Head rules

const HeadRules::Rule& HeadRules::Find(const std::string& label) const {
  auto it = rules_.find(label);
  if (it != rules_.end()) return it->second;
  it = rules_.find("*");
  return it != rules_.end() ? it->second : fallback_;
}

HeadRules HeadRules::Parse(std::istream& in) {
  HeadRules rules;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens.size() < 2)
      throw ParseError("head rule needs a label and a direction", line_number, "line");
    Rule rule;
    if (tokens[1] == "left") {
      rule.direction = SearchDirection::kLeftToRight;
    } else if (tokens[1] == "right") {
      rule.direction = SearchDirection::kRightToLeft;
    } else {
      throw ParseError("head rule direction must be 'left' or 'right'", line_number, "line");
    }
    rule.priorities.assign(tokens.begin() + 2, tokens.end());
    rules.Set(tokens[0], std::move(rule));
  }
  return rules;
}

HeadRules HeadRules::ReadFile(const std::string& path) {
  auto in = OpenInput(path);
  return Parse(in);
}

const char* HeadRules::DefaultText() {
  return
      "ADJP left NNS QP NN $ ADVP JJ VBN VBG ADJP JJR NP JJS DT FW RBR RBS SBAR RB\n"
      "ADVP right RB RBR RBS FW ADVP TO CD JJR JJ IN NP JJS NN\n"
      "CONJP right CC RB IN\n"
      "FRAG right\n"
      "INTJ left\n"
      "LST right LS :\n"
      "NAC left NN NNS NNP NNPS NP NAC EX $ CD QP PRP VBG JJ JJS JJR ADJP FW\n"
      "NP right NN NNP NNPS NNS NX POS JJR NP CD JJ JJS RB QP PRP\n"
      "NX right NN NNP NNPS NNS NX\n"
      "PP right IN TO VBG VBN RP FW\n"
      "PRN left\n"
      "PRT right RP\n"
      "QP left $ IN NNS NN JJ RB DT CD NCD QP JJR JJS\n"
      "RRC right VP NP ADVP ADJP PP\n"
      "S left TO IN VP S SBAR ADJP UCP NP\n"
      "SBAR left WHNP WHPP WHADVP WHADJP IN DT S SQ SINV SBAR FRAG\n"
      "SBARQ left SQ S SINV SBARQ FRAG\n"
      "SINV left VBZ VBD VBP VB MD VP S SINV ADJP NP\n"
      "SQ left VBZ VBD VBP VB MD VP SQ\n"
      "UCP right\n"
      "VP left TO VBD VBN MD VBZ VB VBG VBP VP ADJP NN NNS NP\n"
      "WHADJP left CC WRB JJ ADJP\n"
      "WHADVP right CC WRB\n"
      "WHNP left WDT WP WP$ WHADJP WHPP WHNP\n"
      "WHPP right IN TO FW\n"
      "* left\n";
}

HeadRules HeadRules::Default() {
  std::istringstream in(DefaultText());
  return Parse(in);
}

// ---------------------------------------------------------------------------
// Percolation and binarization

HeadTree PercolateHeadwords(const BracketedTree& tree, const HeadRules& rules) {
  HeadTree out;
  out.label = tree.label;
  if (tree.is_leaf()) {
    out.word = tree.word;
    out.head = {tree.word, tree.label};
    return out;
  }
  out.children.reserve(tree.children.size());
  for (const auto& child : tree.children)
    out.children.push_back(PercolateHeadwords(child, rules));

  const auto& rule = rules.Find(tree.label);
  const int n = static_cast<int>(out.children.size());
  const bool l2r = rule.direction == SearchDirection::kLeftToRight;
  int selected = -1;
  for (const auto& wanted : rule.priorities) {
    for (int k = 0; k < n && selected < 0; ++k) {
      int i = l2r ? k : n - 1 - k;
      if (out.children[i].label == wanted) selected = i;
    }
    if (selected >= 0) break;
  }
  if (selected < 0) selected = l2r ? 0 : n - 1;
  out.head_child = selected;
  out.head = {out.children[selected].head.word, out.children[selected].label};
  return out;
}

namespace {

BinarizedTree Leaf(const HeadTree& tree) {
  BinarizedTree leaf;
  leaf.label = tree.label;
  leaf.word = tree.word;
  leaf.head = tree.head;
  return leaf;
}

BinarizedTree Combine(const std::string& label, const Head& head, bool head_is_left,
                      BinarizedTree left, BinarizedTree right) {
  BinarizedTree node;
  node.label = label;
  node.head = head;
  node.head_is_left = head_is_left;
  node.children.push_back(std::move(left));
  node.children.push_back(std::move(right));
  return node;
}

}  // namespace

BinarizedTree Binarize(const HeadTree& tree) {
  if (tree.is_leaf()) return Leaf(tree);
  const int n = static_cast<int>(tree.children.size());
  if (n == 1) {
    BinarizedTree child = Binarize(tree.children[0]);
    if (child.is_leaf() || tree.label.empty()) return child;
    child.label = tree.label;
    return child;
  }
  const int h = tree.head_child;
  BinarizedTree spine = Binarize(tree.children[h]);
  for (int j = h + 1; j < n; ++j)
    spine = Combine(tree.label, tree.head, true, std::move(spine),
                    Binarize(tree.children[j]));
  for (int j = h - 1; j >= 0; --j)
    spine = Combine(tree.label, tree.head, false, Binarize(tree.children[j]),
                    std::move(spine));
  return spine;
}

std::vector<std::string> Yield(const BinarizedTree& tree) {
  std::vector<std::string> words;
  CollectYield(tree, &words);
  return words;
}

std::string Serialize(const BinarizedTree& tree) {
  if (tree.is_leaf()) return "(" + tree.label + " " + tree.word + ")";
  return "(" + tree.label + " " + Serialize(tree.left()) + " " + Serialize(tree.right()) + ")";
}

bool CheckBinarized(const BinarizedTree& tree, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (tree.is_leaf()) {
    if (tree.head.word != tree.word) return fail("leaf head differs from its word");
    return true;
  }
  if (tree.children.size() != 2)
    return fail("node " + tree.label + " has " + std::to_string(tree.children.size()) +
                " children");
  if (tree.head.word != tree.head_child().head.word)
    return fail("node " + tree.label + " does not inherit its head child's headword");
  return CheckBinarized(tree.left(), why) && CheckBinarized(tree.right(), why);
}

}  // namespace slm
