#include "csv.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace vaxsite::detail {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<Count> parse_count(std::string_view text) {
  if (auto v = parse_int(text)) return static_cast<Count>(*v);
  // Accept "120.0" style integral reals.
  const auto d = parse_double(text);
  if (!d || std::floor(*d) != *d || std::fabs(*d) > 9.0e15) return std::nullopt;
  return static_cast<Count>(*d);
}

CsvReader::CsvReader(std::istream& in, std::string source,
                     const std::vector<std::string>& expected)
    : in_(in), source_(std::move(source)), columns_(expected.size()) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto header = split(line);
    if (header != expected) {
      std::string want;
      for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
      throw Error(ErrorCode::kMalformedRow,
                  source_ + ":" + std::to_string(line_) + ": expected header '" + want + "'");
    }
    return;
  }
  throw Error(ErrorCode::kEmptyFile, source_ + ": no header line");
}

bool CsvReader::next(CsvRow& row) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (trim(line).empty()) continue;
    row.line = line_;
    row.fields = split(line);
    if (row.fields.size() != columns_) {
      fail(ErrorCode::kMalformedRow, row,
           "expected " + std::to_string(columns_) + " fields, found " +
               std::to_string(row.fields.size()));
    }
    return true;
  }
  return false;
}

void CsvReader::fail(ErrorCode code, const CsvRow& row, const std::string& what) const {
  throw Error(code, source_ + ":" + std::to_string(row.line) + ": " + what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  return in;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace vaxsite::detail
