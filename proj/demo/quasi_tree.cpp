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


// Random disjoint geodesics -> projection family -> calibrated quasi-tree of lines.

#include <iostream>

#include "hypstruct/geodesic_families.hpp"
#include "hypstruct/projection_complex.hpp"

int main() {
  using namespace hypstruct;
  const auto th = geodesic_families::theta_constants();
  const auto cfg = geodesic_families::random_disjoint_geodesics(20, geodesic_families::kDefaultR, 100);
  const auto fam = geodesic_families::family_from_config(cfg, th.theta);
  const auto ax = projection_complex::verify_axioms(fam);
  std::cout << "theta " << th.theta << ", axioms " << (ax.ok() ? "ok" : "violated") << ", max P2 count "
            << ax.max_p2() << "\n";
  const auto cal = projection_complex::calibrate_K(fam);
  std::cout << "K " << cal.K << " after " << cal.doublings << " doublings, embedding defect "
            << cal.embedding_defect << ", bottleneck delta_min " << cal.report.delta_min << " over "
            << cal.report.pairs << " pairs\n";
  return 0;
}
