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

// Plain-text `key = value` configuration with command-line overrides.

#ifndef VDEP_CONFIG_H_
#define VDEP_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vdep {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Lines are `key = value`; '#' starts a comment.
  static KeyValueConfig from_file(const std::filesystem::path& path);
  static KeyValueConfig from_string(std::string_view text);

  // Applies `key=value` assignments, later ones winning.
  void apply_overrides(const std::vector<std::string>& assignments);
  void set(const std::string& key, const std::string& value);

  bool contains(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key,
                           std::uint64_t fallback) const;

  // Throws SchemaError if any key is outside `known`.
  void require_known(const std::vector<std::string_view>& known) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }
  std::string to_string() const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace vdep

#endif  // VDEP_CONFIG_H_
