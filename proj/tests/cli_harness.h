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

// Runs the command-line binary as a subprocess.

#ifndef VDEP_TESTS_CLI_HARNESS_H_
#define VDEP_TESTS_CLI_HARNESS_H_

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

namespace vdep::testing {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// `args` is appended to the binary path verbatim.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(VDEP_CLI) + " " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

// Relative path -> contents for every file under `dir` except run manifests.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "run_manifest.txt") continue;
    out[std::filesystem::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

}  // namespace vdep::testing

#endif  // VDEP_TESTS_CLI_HARNESS_H_
