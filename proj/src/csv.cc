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

#include "vdep/csv.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

#include "vdep/error.h"

namespace vdep::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError("invalid number \"" + std::string(field) + "\"", line_no);
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError("invalid integer \"" + std::string(field) + "\"",
                     line_no);
  }
  return value;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_double(double value, int significant_digits) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                    significant_digits);
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

Writer::Writer(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
}

void Writer::separator() {
  if (!first_) out_ << ',';
  first_ = false;
}

Writer& Writer::field(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

Writer& Writer::field(double value) { return field(format_double(value)); }
Writer& Writer::field(int value) { return field(std::to_string(value)); }
Writer& Writer::field(long value) { return field(std::to_string(value)); }
Writer& Writer::field(std::size_t value) {
  return field(std::to_string(value));
}
Writer& Writer::field(const std::optional<double>& value) {
  return field(format_optional(value));
}

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
}

Reader::Reader(const std::filesystem::path& path) : in_(path) {
  if (!in_) throw ParseError("cannot open " + path.string());
  std::vector<std::string_view> fields;
  if (!next(fields)) throw ParseError("missing header row in " + path.string());
  for (auto f : fields) header_.emplace_back(f);
}

std::size_t Reader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ParseError("missing column \"" + std::string(name) + "\"", 1);
}

bool Reader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty()) continue;
    fields = split(line_);
    return true;
  }
  return false;
}

}  // namespace vdep::csv
