#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "trk/types.hpp"

namespace trk::detail {

/// Line-oriented CSV reader with positional error messages.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& file) : path_(file.string()) {
    in_.open(file);
    if (!in_) throw IoError("cannot open " + path_);
  }

  /// Reads the next line split on commas. Returns false at EOF.
  bool next_row(std::vector<std::string_view>& fields) {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    fields.clear();
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line_.find(',', start);
      if (comma == std::string::npos) {
        fields.emplace_back(line_.data() + start, line_.size() - start);
        break;
      }
      fields.emplace_back(line_.data() + start, comma - start);
      start = comma + 1;
    }
    return true;
  }

  void expect_header(std::string_view header) {
    if (!std::getline(in_, line_)) fail("missing header");
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_ != header) {
      fail("expected header '" + std::string(header) + "', got '" + line_ +
           "'");
    }
  }

  double parse_double(std::string_view field) const {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      fail("bad numeric field '" + std::string(field) + "'");
    }
    return value;
  }

  std::int64_t parse_int(std::string_view field) const {
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      fail("bad integer field '" + std::string(field) + "'");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(path_ + ":" + std::to_string(line_no_) + ": " +
                          what);
  }

  int line_no() const { return line_no_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string line_;
  int line_no_ = 0;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);  // LF line endings everywhere
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace trk::detail
