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

#ifndef CTMC_TARGETS_DATASET_HPP
#define CTMC_TARGETS_DATASET_HPP

#include <ctmc/errors.hpp>
#include <ctmc/targets/bounds.hpp>

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ctmc::targets {

/// Reads one observation per line; blank lines are skipped.
inline std::vector<double> load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError{"cannot open dataset " + path.string()};
  }
  std::vector<double> data;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      data.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw ConfigError{"dataset " + path.string() + ": bad value on line " + std::to_string(line_number)};
    }
  }
  if (data.empty()) {
    throw ConfigError{"dataset " + path.string() + " is empty"};
  }
  return data;
}

inline void save_dataset_csv(const std::filesystem::path& path, const std::vector<double>& data) {
  std::ofstream out{path};
  if (!out) {
    throw ConfigError{"cannot write dataset " + path.string()};
  }
  out << std::setprecision(17);
  for (double y : data) out << y << '\n';
}

/// 64-bit FNV-1a hash of the observations' bit patterns, as 16 hex digits.
inline std::string dataset_hash(const std::vector<double>& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double y : data) {
    auto bits = std::bit_cast<std::uint64_t>(y);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= bits & 0xffU;
      h *= 0x100000001b3ULL;
      bits >>= 8;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline void save_bound_table(const std::filesystem::path& path, const FactorBoundTable& table,
                             const std::string& hash) {
  const nlohmann::json j{{"dataset_hash", hash},
                         {"lo", table.lo},
                         {"hi", table.hi},
                         {"C", table.C},
                         {"per_factor_max_abs_grad", table.per_factor_max_abs_grad}};
  std::ofstream out{path};
  if (!out) {
    throw ConfigError{"cannot write bound table " + path.string()};
  }
  out << j.dump() << '\n';
}

/// Cached table for the dataset with this hash, or nothing if absent or stale.
inline std::optional<FactorBoundTable> load_bound_table(const std::filesystem::path& path, const std::string& hash) {
  std::ifstream in{path};
  if (!in) {
    return std::nullopt;
  }
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("dataset_hash") || j["dataset_hash"] != hash) {
    return std::nullopt;
  }
  FactorBoundTable table;
  table.lo = j.at("lo").get<double>();
  table.hi = j.at("hi").get<double>();
  table.C = j.at("C").get<double>();
  table.per_factor_max_abs_grad = j.at("per_factor_max_abs_grad").get<std::vector<double>>();
  return table;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_DATASET_HPP
