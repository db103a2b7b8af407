// Copyright 2026 The hypstruct Authors
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


// Prints the poset of hyperbolic structures of the mapping torus of [[2,1],[1,1]].

#include <iostream>

#include "hypstruct/poset.hpp"

int main() {
  using namespace hypstruct;
  const poset::PosetDiagram d = poset::anosov_poset(groups::IntMatrix2{2, 1, 1, 1});
  std::cout << poset::emit_dot(d);
  for (const auto& e : d.edges) {
    std::cout << "# " << d.nodes[e.greater].label << " > " << d.nodes[e.lesser].label << " via "
              << e.witness.map_name << ", equivariance defect " << e.witness.equivariance_defect << "\n";
  }
  for (const auto& [k, v] : d.metadata) std::cout << "# " << k << ": " << v << "\n";
  return d.consistent() ? 0 : 1;
}
