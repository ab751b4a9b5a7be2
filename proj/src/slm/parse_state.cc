#include "slm/parse_state.h"

#include "slm/error.h"

namespace slm {

int32_t ParserAction::Code() const {
  switch (kind) {
    case Kind::kNull: return 0;
    case Kind::kAdjoinLeft: return 1 + 2 * label;
    case Kind::kAdjoinRight: return 2 + 2 * label;
  }
  return 0;
}

ParserAction ParserAction::FromCode(int32_t code) {
  if (code == 0) return Null();
  return (code % 2 == 1) ? AdjoinLeft((code - 1) / 2) : AdjoinRight((code - 2) / 2);
}

std::string ToString(const ParserAction& action, const Vocabulary& vocab) {
  switch (action.kind) {
    case ParserAction::Kind::kNull: return "null";
    case ParserAction::Kind::kAdjoinLeft:
      return "adjoin-left(" + vocab.labels().Symbol(action.label) + ")";
    case ParserAction::Kind::kAdjoinRight:
      return "adjoin-right(" + vocab.labels().Symbol(action.label) + ")";
  }
  return "?";
}

ParseTreePtr MakeLeaf(WordId word, CategoryId tag) {
  auto node = std::make_shared<ParseNode>();
  node->head = {word, tag};
  return node;
}

ParseTreePtr MakeInternal(ParseTreePtr left, ParseTreePtr right, bool head_is_left,
                          CategoryId label) {
  auto node = std::make_shared<ParseNode>();
  node->head = {head_is_left ? left->head.word : right->head.word, label};
  node->head_is_left = head_is_left;
  node->left = std::move(left);
  node->right = std::move(right);
  return node;
}

ParseTreePtr StripSentenceEnd(const ParseTreePtr& tree) {
  if (tree == nullptr) return nullptr;
  if (tree->is_leaf()) return tree->head.word == Vocabulary::kEos ? nullptr : tree;
  ParseTreePtr left = StripSentenceEnd(tree->left);
  ParseTreePtr right = StripSentenceEnd(tree->right);
  if (left == nullptr) return right;
  if (right == nullptr) return left;
  if (left == tree->left && right == tree->right) return tree;
  return MakeInternal(std::move(left), std::move(right), tree->head_is_left, tree->head.category);
}

bool SameTree(const ParseNode* a, const ParseNode* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->head != b->head || a->is_leaf() != b->is_leaf()) return false;
  if (a->is_leaf()) return true;
  return a->head_is_left == b->head_is_left && SameTree(a->left.get(), b->left.get()) &&
         SameTree(a->right.get(), b->right.get());
}

namespace {

void CollectYield(const ParseNode& tree, std::vector<WordId>* out) {
  if (tree.is_leaf()) {
    out->push_back(tree.head.word);
    return;
  }
  CollectYield(*tree.left, out);
  CollectYield(*tree.right, out);
}

void FormatTo(const ParseNode& tree, const Vocabulary& vocab, std::string* out) {
  out->push_back('(');
  out->append(vocab.CategoryString(tree.head.category));
  out->push_back(' ');
  if (tree.is_leaf()) {
    out->append(vocab.WordString(tree.head.word));
  } else {
    FormatTo(*tree.left, vocab, out);
    out->push_back(' ');
    FormatTo(*tree.right, vocab, out);
  }
  out->push_back(')');
}

}  // namespace

std::vector<WordId> Yield(const ParseNode& tree) {
  std::vector<WordId> out;
  CollectYield(tree, &out);
  return out;
}

std::string FormatTree(const ParseNode& tree, const Vocabulary& vocab) {
  std::string out;
  FormatTo(tree, vocab, &out);
  return out;
}

ParseTreePtr ToParseTree(const BinarizedTree& tree, const Vocabulary& vocab) {
  if (tree.is_leaf()) {
    CategoryId tag = vocab.Tag(tree.label);
    if (tag == kNoSymbol)
      throw Error(ErrorCode::kVocabularyMismatch, "unknown tag '" + tree.label + "'");
    return MakeLeaf(vocab.Word(tree.word), tag);
  }
  CategoryId label = vocab.Label(tree.label);
  if (label == kNoSymbol)
    throw Error(ErrorCode::kVocabularyMismatch, "unknown label '" + tree.label + "'");
  return MakeInternal(ToParseTree(tree.left(), vocab), ToParseTree(tree.right(), vocab),
                      tree.head_is_left, label);
}

std::string ToString(const ParseDerivation& derivation, const Vocabulary& vocab) {
  std::string out;
  for (const auto& pos : derivation.positions) {
    if (!out.empty()) out += " | ";
    out += "shift(" + vocab.WordString(pos.word) + "/" + vocab.CategoryString(pos.tag) + ")";
    for (const auto& a : pos.actions) out += " " + ToString(a, vocab);
  }
  return out;
}

WordParsePrefix WordParsePrefix::Initial(const Vocabulary& vocab) {
  WordParsePrefix p;
  const CategoryId sb = vocab.SentenceBeginCategory();
  p.heads.push_back({Vocabulary::kBos, sb});
  p.fragments.push_back(MakeLeaf(Vocabulary::kBos, sb));
  p.words.push_back(Vocabulary::kBos);
  return p;
}

ExposedHead WordParsePrefix::h1() const {
  if (heads.size() < 2) return {kNoSymbol, kNoSymbol};
  return heads[heads.size() - 2];
}

std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, bool at_sentence_end,
                                       int32_t num_labels, ParserMode mode, int32_t root_label) {
  std::vector<ParserAction> legal;
  if (prefix.closed) return legal;
  const bool can_adjoin = prefix.open_fragments() >= 2;
  if (mode == ParserMode::kNullOnly) {
    if (at_sentence_end && can_adjoin) {
      legal.push_back(ParserAction::AdjoinLeft(0));
    } else {
      legal.push_back(ParserAction::Null());
    }
    return legal;
  }
  if (!at_sentence_end || !can_adjoin) legal.push_back(ParserAction::Null());
  if (!can_adjoin) return legal;
  if (root_label != kNoSymbol && at_sentence_end && prefix.open_fragments() == 2) {
    legal.push_back(ParserAction::AdjoinLeft(root_label));
    return legal;
  }
  for (int32_t l = 0; l < num_labels; ++l) {
    if (l == root_label) continue;
    legal.push_back(ParserAction::AdjoinLeft(l));
    legal.push_back(ParserAction::AdjoinRight(l));
  }
  return legal;
}

std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, int32_t num_labels,
                                       ParserMode mode, int32_t root_label) {
  return LegalActions(prefix, prefix.at_sentence_end(), num_labels, mode, root_label);
}

std::vector<ParserAction> LegalActions(const WordParsePrefix& prefix, const Vocabulary& vocab,
                                       ParserMode mode) {
  return LegalActions(prefix, vocab.num_labels(), mode, vocab.RootLabel());
}

bool IsLegal(const WordParsePrefix& prefix, const ParserAction& action, const Vocabulary& vocab,
             ParserMode mode) {
  for (const auto& a : LegalActions(prefix, vocab, mode))
    if (a == action) return true;
  return false;
}

WordParsePrefix ApplyAction(const WordParsePrefix& prefix, const ParserAction& action,
                            const Vocabulary& vocab, ParserMode mode) {
  if (prefix.closed)
    throw Error(ErrorCode::kIllegalAction, "position already closed by null");
  if (!action.is_null() && (action.label < 0 || action.label >= vocab.num_labels()))
    throw Error(ErrorCode::kIllegalAction, "label index out of range");
  if (!IsLegal(prefix, action, vocab, mode)) {
    std::string why = ToString(action, vocab) + " is not legal: ";
    if (action.is_null()) {
      why += "the sentence end requires a single constituent";
    } else if (prefix.open_fragments() < 2) {
      why += "adjoining needs two exposed heads above <s>";
    } else if (action.label == vocab.RootLabel()) {
      why += "the root label is reserved for the final sentence-end adjoin";
    } else {
      why += "the parser mode forbids it";
    }
    throw Error(ErrorCode::kIllegalAction, why);
  }
  WordParsePrefix next = prefix;
  next.derivation.positions.back().actions.push_back(action);
  if (action.is_null()) {
    next.closed = true;
    return next;
  }
  const bool left = action.kind == ParserAction::Kind::kAdjoinLeft;
  ParseTreePtr right_frag = std::move(next.fragments.back());
  next.fragments.pop_back();
  ParseTreePtr left_frag = std::move(next.fragments.back());
  next.fragments.pop_back();
  next.heads.resize(next.heads.size() - 2);
  ParseTreePtr node = MakeInternal(std::move(left_frag), std::move(right_frag), left,
                                   vocab.LabelCategory(action.label));
  next.heads.push_back(node->head);
  next.fragments.push_back(std::move(node));
  return next;
}

WordParsePrefix ShiftWord(const WordParsePrefix& prefix, WordId word, CategoryId tag) {
  if (!prefix.closed)
    throw Error(ErrorCode::kIllegalAction, "shift before the previous position was closed");
  if (prefix.at_sentence_end())
    throw Error(ErrorCode::kIllegalAction, "shift after the sentence end");
  WordParsePrefix next = prefix;
  next.heads.push_back({word, tag});
  next.fragments.push_back(MakeLeaf(word, tag));
  next.words.push_back(word);
  next.tags.push_back(tag);
  next.derivation.positions.push_back({word, tag, {}});
  next.closed = false;
  return next;
}

WordParsePrefix Replay(const ParseDerivation& derivation, const Vocabulary& vocab,
                       ParserMode mode) {
  WordParsePrefix p = WordParsePrefix::Initial(vocab);
  try {
    for (const auto& pos : derivation.positions) {
      if (pos.actions.empty() || !pos.actions.back().is_null())
        throw Error(ErrorCode::kInvalidDerivation, "position does not end with null");
      p = ShiftWord(p, pos.word, pos.tag);
      for (const auto& a : pos.actions) p = ApplyAction(p, a, vocab, mode);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidDerivation) throw;
    throw Error(ErrorCode::kInvalidDerivation, std::string("replay failed: ") + e.what());
  }
  return p;
}

}  // namespace slm
