// src/container.cpp

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

#include "scatloc/container.hpp"

#include <fstream>
#include <stdexcept>

namespace scatloc {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void write_container(const std::string& path, nlohmann::ordered_json manifest,
                     const std::vector<std::pair<std::string, const Eigen::MatrixXd*>>& mats) {
  nlohmann::ordered_json index = nlohmann::ordered_json::array();
  for (const auto& [name, m] : mats)
    index.push_back({{"name", name}, {"rows", m->rows()}, {"cols", m->cols()}});
  manifest["matrices"] = index;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_container: cannot open " + path);
  f << manifest.dump() << '\n';
  for (const auto& [name, m] : mats) {
    RowMajor rm = *m;
    f.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * rm.size()));
  }
  if (!f) throw std::runtime_error("write_container: write failed for " + path);
}

Container read_container(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_container: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("read_container: missing manifest");

  Container c;
  c.manifest = nlohmann::ordered_json::parse(line);
  if (!c.manifest.contains("matrices"))
    throw std::runtime_error("read_container: manifest lacks matrix index");
  for (const auto& entry : c.manifest["matrices"]) {
    const std::string name = entry["name"];
    const Eigen::Index rows = entry["rows"], cols = entry["cols"];
    RowMajor rm(rows, cols);
    f.read(reinterpret_cast<char*>(rm.data()),
           static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (!f) throw std::runtime_error("read_container: truncated payload in " + path);
    c.matrices[name] = rm;
  }
  return c;
}

}  // namespace scatloc
