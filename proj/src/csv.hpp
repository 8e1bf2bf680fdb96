#pragma once

// Minimal reader for the comma-separated input files: header line first,
// no quoting, '.' decimal separator.

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaxsite/common.hpp"

namespace vaxsite::detail {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char sep = ',');

std::optional<double> parse_double(std::string_view text);
std::optional<Count> parse_count(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

class CsvReader {
 public:
  // Reads the header and checks it matches `expected` exactly (after trimming).
  CsvReader(std::istream& in, std::string source,
            const std::vector<std::string>& expected);

  // Skips blank lines; returns false at end of input.
  bool next(CsvRow& row);

  [[noreturn]] void fail(ErrorCode code, const CsvRow& row,
                         const std::string& what) const;
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t columns_ = 0;
  std::size_t line_ = 0;
};

std::ifstream open_input(const std::string& path);

// Shortest round-trip text for a double.
std::string format_double(double value);

}  // namespace vaxsite::detail
