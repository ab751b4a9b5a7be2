#include "slm/text_io.h"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "slm/error.h"

namespace slm {

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open input file '" + path + "'");
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open output file '" + path + "'");
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  return std::string(buf, end);
}

double ParseDouble(std::string_view token, size_t line) {
  std::string copy(token);
  char* end = nullptr;
  double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size())
    throw ParseError("expected a number, got '" + copy + "'", line, "line");
  return v;
}

long long ParseInt(std::string_view token, size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected an integer, got '" + std::string(token) + "'", line, "line");
  return v;
}

bool LineReader::Next(std::string* line) {
  if (!std::getline(in_, *line)) return false;
  ++line_;
  if (!line->empty() && line->back() == '\r') line->pop_back();
  return true;
}

std::vector<std::string> LineReader::Tokens() {
  std::string line;
  if (!Next(&line)) Fail("unexpected end of input");
  return SplitWhitespace(line);
}

std::vector<std::string> LineReader::Expect(std::string_view keyword) {
  auto tokens = Tokens();
  if (tokens.empty() || tokens[0] != keyword)
    Fail("expected '" + std::string(keyword) + "'");
  tokens.erase(tokens.begin());
  return tokens;
}

void LineReader::Fail(const std::string& message) const {
  throw ParseError(message, line_, "line");
}

}  // namespace slm
