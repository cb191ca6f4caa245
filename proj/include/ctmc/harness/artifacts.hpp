// Copyright 2026 The ctmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTMC_HARNESS_ARTIFACTS_HPP
#define CTMC_HARNESS_ARTIFACTS_HPP

#include <ctmc/errors.hpp>
#include <ctmc/harness/config.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#ifndef CTMC_GIT_HASH
#define CTMC_GIT_HASH "unknown"
#endif

namespace ctmc::harness {

inline constexpr const char* kCodeVersion = CTMC_GIT_HASH;

/// Writes `contents` to a temporary sibling and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    if (!out) {
      throw ConfigError{"cannot write " + tmp.string()};
    }
    out << contents;
    if (!out.flush()) {
      throw ConfigError{"failed writing " + tmp.string()};
    }
  }
  std::filesystem::rename(tmp, path);
}

/// Config, seed, stream and code version; enough to rerun the command that produced `artifacts`.
inline nlohmann::ordered_json make_manifest(const std::string& command, const ExperimentConfig& config,
                                            const std::vector<std::string>& artifacts) {
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  nlohmann::ordered_json m;
  m["command"] = command;
  m["seed"] = config.seed;
  m["stream"] = config.stream;
  m["code_version"] = kCodeVersion;
  m["config"] = cfg;
  m["artifacts"] = artifacts;
  return m;
}

/// manifest.json plus config.txt, which `--config` accepts as is.
inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const ExperimentConfig& config,
                           const std::vector<std::string>& artifacts) {
  write_file_atomic(dir / "manifest.json", make_manifest(command, config, artifacts).dump(2) + "\n");
  write_file_atomic(dir / "config.txt", config.to_text());
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_ARTIFACTS_HPP
