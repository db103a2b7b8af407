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


// Britton normal forms in BS(1,2): conjugating a by b^k gives a^(2^k).

#include <iostream>

#include "hypstruct/groups.hpp"

int main() {
  using namespace hypstruct::groups;
  const BaumslagSolitar G(1, 2);
  for (int k = 0; k <= 20; k += 4) {
    const BSElement bk = G.pow(G.normal_form("b"), k);
    const BSElement x = G.mul(G.mul(bk, G.normal_form("a")), G.inv(bk));
    std::cout << "b^" << k << " a b^-" << k << " = " << to_string(x) << "\n";
  }
  return 0;
}
