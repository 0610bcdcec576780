// Copyright 2026 The nimc Authors. All Rights Reserved.
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

#include "nimc/error.hpp"

#include <sstream>

namespace nimc {

namespace {
std::string describe(int iteration, double decrease, double bound) {
  std::ostringstream os;
  os.precision(17);
  os << "sufficient decrease violated at iteration " << iteration << ": F_k - F_{k+1} = "
     << decrease << " < bound " << bound;
  return os.str();
}
}  // namespace

DescentViolation::DescentViolation(int iteration, double decrease, double bound)
    : std::runtime_error(describe(iteration, decrease, bound)),
      iteration_(iteration),
      decrease_(decrease),
      bound_(bound) {}

}  // namespace nimc
