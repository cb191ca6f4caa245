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

#ifndef CTMC_PDP_SKELETON_IO_HPP
#define CTMC_PDP_SKELETON_IO_HPP

#include <ctmc/errors.hpp>
#include <ctmc/pdp/skeleton.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace ctmc::pdp {

/// Run metadata written as the first line of a skeleton file.
struct SkeletonHeader {
  std::size_t dimension = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Writes a skeleton as JSON lines: one header object, then one object per point.
inline void write_skeleton_jsonl(std::ostream& os, const Skeleton& skeleton, std::uint64_t seed,
                                 std::uint64_t stream) {
  nlohmann::json header{{"d", skeleton.dimension()}, {"T", skeleton.horizon()}, {"seed", seed}, {"stream", stream}};
  os << header.dump() << '\n';
  for (std::size_t k = 0; k < skeleton.size(); ++k) {
    nlohmann::json line{{"t", skeleton.time(k)},
                        {"x", to_std(skeleton.position(k))},
                        {"v", to_std(skeleton.velocity(k))},
                        {"kind", event_label(skeleton.kind(k), skeleton.index(k))}};
    os << line.dump() << '\n';
  }
}

inline std::pair<SkeletonHeader, Skeleton> read_skeleton_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw ContractViolation{"read_skeleton_jsonl: missing header"};
  }
  const auto header_json = nlohmann::json::parse(line);
  SkeletonHeader header{header_json.at("d").get<std::size_t>(), header_json.at("T").get<double>(),
                        header_json.at("seed").get<std::uint64_t>(), header_json.at("stream").get<std::uint64_t>()};
  Skeleton skeleton{header.dimension, header.horizon};
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const auto point = nlohmann::json::parse(line);
    const auto [kind, index] = parse_event_label(point.at("kind").get<std::string>());
    skeleton.append(point.at("t").get<double>(), from_std(point.at("x").get<std::vector<double>>()),
                    from_std(point.at("v").get<std::vector<double>>()), kind, index);
  }
  return {header, std::move(skeleton)};
}

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_SKELETON_IO_HPP
