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

#include "tickbound/clock_model.hpp"
#include "tickbound/core.hpp"
#include "tickbound/dormand_prince.hpp"
#include "tickbound/error.hpp"
#include "tickbound/matrix_exponential.hpp"
#include "tickbound/model_io.hpp"
#include "tickbound/models.hpp"
#include "tickbound/notick.hpp"
#include "tickbound/oracles.hpp"
#include "tickbound/parallel.hpp"
#include "tickbound/quadrature.hpp"
#include "tickbound/rng.hpp"
#include "tickbound/stats.hpp"
#include "tickbound/tick_statistics.hpp"
#include "tickbound/trajectory.hpp"
#include "tickbound/verify.hpp"

namespace tickbound {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tickbound
