/*
 * Copyright 2026 The VDEP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Minimal comma-separated I/O. Fields never contain commas or quotes in the
// formats this project reads and writes.

#ifndef VDEP_CSV_H_
#define VDEP_CSV_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vdep::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

// Strict numeric parsing; throws ParseError carrying `line_no`.
double parse_double(std::string_view field, std::size_t line_no);
int parse_int(std::string_view field, std::size_t line_no);

// Shortest representation that round-trips exactly.
std::string format_double(double value);
// Fixed number of significant digits (used where files promise a precision).
std::string format_double(double value, int significant_digits);
std::string format_optional(const std::optional<double>& value);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);

  Writer& field(std::string_view text);
  Writer& field(double value);
  Writer& field(int value);
  Writer& field(long value);
  Writer& field(std::size_t value);
  Writer& field(const std::optional<double>& value);
  void end_row();

  template <typename... Fields>
  void row(const Fields&... fields) {
    (field(fields), ...);
    end_row();
  }

 private:
  void separator();
  std::ofstream out_;
  bool first_ = true;
};

// Reads the file line by line; `header` receives the first line's fields.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  // Column index for `name`; throws ParseError when absent.
  std::size_t column(std::string_view name) const;
  // Returns false at end of file. Blank lines are skipped.
  bool next(std::vector<std::string_view>& fields);
  std::size_t line_number() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string line_;
  std::vector<std::string> header_;
  std::size_t line_no_ = 0;
};

}  // namespace vdep::csv

#endif  // VDEP_CSV_H_
