// Copyright 2026 The qmem Authors
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

#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

namespace testing_support {

/// Within one unit of the last printed digit of `printed` ("1.39e4", "51.0", "2.16e-2").
/// "<0" accepts negative values.
inline bool within_printed(double value, const std::string& printed) {
  if (printed == "<0") return value < 0;
  const auto e = printed.find_first_of("eE");
  const std::string mant = printed.substr(0, e);
  const int exponent = e == std::string::npos ? 0 : std::atoi(printed.c_str() + e + 1);
  const auto dot = mant.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(mant.size() - dot - 1);
  const double unit = std::pow(10.0, exponent - decimals);
  return std::abs(value - std::strtod(printed.c_str(), nullptr)) <= unit * (1 + 1e-9);
}

}  // namespace testing_support
