#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace earlyrank {

/// Malformed or inconsistent input data. The message names the file and line when known.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tsv {

inline std::vector<std::string_view> split(std::string_view line, char sep = '\t') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// True for lines a reader should skip: empty, or starting with '#'.
inline bool is_skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
std::optional<T> parse_number(std::string_view field) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) return std::nullopt;
  return value;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: buffer too small");
  return std::string(buf, ptr);
}

inline std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

/// Reads a file line by line, calling fn(line_number, fields) for every data line.
template <typename Fn>
void for_each_record(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = strip_cr(line);
    if (is_skippable(view)) continue;
    fn(line_no, split(view));
  }
}

}  // namespace tsv
}  // namespace earlyrank
