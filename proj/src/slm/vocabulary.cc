#include "slm/vocabulary.h"

#include "slm/error.h"
#include "slm/text_io.h"

namespace slm {

int32_t SymbolTable::Add(std::string_view symbol) {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  int32_t id = size();
  symbols_.emplace_back(symbol);
  index_.emplace(symbols_.back(), id);
  return id;
}

int32_t SymbolTable::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kNoSymbol : it->second;
}

Vocabulary::Vocabulary() {
  words_.Add(kSentenceBegin);
  words_.Add(kSentenceEnd);
  words_.Add(kUnknownWord);
}

WordId Vocabulary::AddWord(std::string_view word) { return words_.Add(word); }

WordId Vocabulary::Word(std::string_view word) const {
  WordId id = words_.Find(word);
  return id == kNoSymbol ? kUnk : id;
}

bool Vocabulary::HasWord(std::string_view word) const {
  return words_.Find(word) != kNoSymbol;
}

CategoryId Vocabulary::AddTag(std::string_view tag) {
  if (tags_collapsed_) return 0;
  if (labels_.size() > 0)
    throw Error(ErrorCode::kInternal, "tags must be added before labels");
  return tags_.Add(tag);
}

CategoryId Vocabulary::AddLabel(std::string_view label) {
  if (labels_collapsed_) return num_tags();
  return num_tags() + labels_.Add(label);
}

CategoryId Vocabulary::Tag(std::string_view tag) const {
  if (tags_collapsed_) return 0;
  return tags_.Find(tag);
}

CategoryId Vocabulary::Label(std::string_view label) const {
  if (labels_collapsed_) return num_tags();
  int32_t id = labels_.Find(label);
  return id == kNoSymbol ? kNoSymbol : num_tags() + id;
}

const std::string& Vocabulary::CategoryString(CategoryId c) const {
  if (IsTag(c)) return tags_.Symbol(c);
  if (IsLabel(c)) return labels_.Symbol(LabelIndex(c));
  throw Error(ErrorCode::kInvalidArgument,
              "category id " + std::to_string(c) + " out of range");
}

CategoryId Vocabulary::SentenceBeginCategory() const {
  if (num_tags() == 0)
    throw Error(ErrorCode::kInvalidArgument, "vocabulary has no tags");
  CategoryId sb = Tag(kSentenceBeginTag);
  return sb == kNoSymbol ? 0 : sb;
}

int32_t Vocabulary::RootLabel() const {
  if (labels_collapsed_) return kNoSymbol;
  return labels_.Find(kRootLabel);
}

void Vocabulary::CollapseTags(std::string_view name) {
  tags_ = SymbolTable();
  tags_.Add(name);
  tags_collapsed_ = true;
}

void Vocabulary::CollapseLabels(std::string_view name) {
  labels_ = SymbolTable();
  labels_.Add(name);
  labels_collapsed_ = true;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return words_ == other.words_ && tags_ == other.tags_ &&
         labels_ == other.labels_ && tags_collapsed_ == other.tags_collapsed_ &&
         labels_collapsed_ == other.labels_collapsed_;
}

Vocabulary Vocabulary::ReadWordFile(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    vocab.AddWord(tokens[0]);
  }
  return vocab;
}

Vocabulary Vocabulary::ReadWordFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadWordFile(in);
}

void Vocabulary::Write(std::ostream& out) const {
  out << "words " << num_words() << '\n';
  for (const auto& w : words_.symbols()) out << w << '\n';
  out << "tags " << num_tags() << ' ' << (tags_collapsed_ ? 1 : 0) << '\n';
  for (const auto& t : tags_.symbols()) out << t << '\n';
  out << "labels " << num_labels() << ' ' << (labels_collapsed_ ? 1 : 0) << '\n';
  for (const auto& l : labels_.symbols()) out << l << '\n';
}

namespace {

SymbolTable ReadSymbols(LineReader& reader, long long count) {
  SymbolTable table;
  for (long long i = 0; i < count; ++i) {
    auto tokens = reader.Tokens();
    if (tokens.size() != 1) reader.Fail("expected one symbol per line");
    if (table.Find(tokens[0]) != kNoSymbol) reader.Fail("duplicate symbol '" + tokens[0] + "'");
    table.Add(tokens[0]);
  }
  return table;
}

}  // namespace

Vocabulary Vocabulary::Read(LineReader& reader) {
  Vocabulary vocab;
  auto args = reader.Expect("words");
  if (args.size() != 1) reader.Fail("malformed 'words' header");
  vocab.words_ = ReadSymbols(reader, ParseInt(args[0], reader.line_number()));
  if (vocab.words_.size() < 3 || vocab.words_.Symbol(kBos) != kSentenceBegin ||
      vocab.words_.Symbol(kEos) != kSentenceEnd ||
      vocab.words_.Symbol(kUnk) != kUnknownWord)
    reader.Fail("word table must start with <s> </s> <unk>");
  args = reader.Expect("tags");
  if (args.size() != 2) reader.Fail("malformed 'tags' header");
  vocab.tags_ = ReadSymbols(reader, ParseInt(args[0], reader.line_number()));
  vocab.tags_collapsed_ = args[1] == "1";
  args = reader.Expect("labels");
  if (args.size() != 2) reader.Fail("malformed 'labels' header");
  vocab.labels_ = ReadSymbols(reader, ParseInt(args[0], reader.line_number()));
  vocab.labels_collapsed_ = args[1] == "1";
  return vocab;
}

}  // namespace slm
