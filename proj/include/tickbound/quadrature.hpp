// Copyright 2026 The tickbound Authors
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

#include <array>

namespace tickbound {

/// 8-point Gauss-Legendre rule mapped to [0, 1]; exact for degree <= 15.
struct GaussLegendre8 {
  static constexpr std::array<double, 8> nodes = {
      0.01985507175123188, 0.10166676129318664, 0.23723379504183550, 0.40828267875217510,
      0.59171732124782490, 0.76276620495816450, 0.89833323870681336, 0.98014492824876812};
  static constexpr std::array<double, 8> weights = {
      0.05061426814518813, 0.11119051722668724, 0.15685332293894364, 0.18134189168918100,
      0.18134189168918100, 0.15685332293894364, 0.11119051722668724, 0.05061426814518813};
};

}  // namespace tickbound
