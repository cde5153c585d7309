// include/scatloc/container.hpp

// Copyright 2026 The scatloc authors
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

#ifndef SCATLOC_CONTAINER_HPP
#define SCATLOC_CONTAINER_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace scatloc {

/// On-disk container shared by device and dictionary files: a single-line
/// JSON manifest, '\n', then the listed matrices as raw little-endian
/// float64, row-major, in manifest order ("matrices": [{name, rows, cols}]).
struct Container {
  nlohmann::ordered_json manifest;
  std::map<std::string, Eigen::MatrixXd> matrices;
};

void write_container(const std::string& path, nlohmann::ordered_json manifest,
                     const std::vector<std::pair<std::string, const Eigen::MatrixXd*>>& mats);

Container read_container(const std::string& path);

}  // namespace scatloc

#endif  // SCATLOC_CONTAINER_HPP
