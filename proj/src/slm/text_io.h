#ifndef SLM_TEXT_IO_H_
#define SLM_TEXT_IO_H_

#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace slm {

std::vector<std::string> SplitWhitespace(std::string_view line);

std::ifstream OpenInput(const std::string& path);
std::ofstream OpenOutput(const std::string& path);

// Shortest decimal representation that reads back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view token, size_t line);
long long ParseInt(std::string_view token, size_t line);

// Line-oriented reader for the model container; errors report line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line, or false at end of input.
  bool Next(std::string* line);
  // Next line split into tokens; throws on end of input.
  std::vector<std::string> Tokens();
  // Reads a line "<keyword> <args...>" and returns the args.
  std::vector<std::string> Expect(std::string_view keyword);
  size_t line_number() const { return line_; }
  [[noreturn]] void Fail(const std::string& message) const;

 private:
  std::istream& in_;
  size_t line_ = 0;
};

}  // namespace slm

#endif  // SLM_TEXT_IO_H_
