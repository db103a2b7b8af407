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


// Bounded projections around a white hub of a depth-3 Schottky flip tree.

#include <iomanip>
#include <iostream>

#include "hypstruct/geodesic_families.hpp"

int main() {
  using namespace hypstruct::geodesic_families;
  const ScanScenario sc = scan_scenario(FlipTreeParams{}, 3, 1, 10);
  std::cout << sc.tree.nodes.size() << " nodes, hub " << sc.hub << "\n" << std::setprecision(12);
  for (int N : {1, 3, 10}) {
    const ProjectionScan s = bounded_projection_scan(sc, N);
    std::cout << "N " << N << ": max spread " << s.max_spread << ", non-adjacent pairs " << s.nonadjacent_pairs
              << (s.nonadjacent_all_zero ? " (all zero)" : " (NONZERO)") << "\n";
  }
  return 0;
}
