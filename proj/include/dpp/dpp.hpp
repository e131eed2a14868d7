// Copyright 2026 The Authors.
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

#include "dpp/checks.hpp"
#include "dpp/demos.hpp"
#include "dpp/dual.hpp"
#include "dpp/error.hpp"
#include "dpp/factor_graph.hpp"
#include "dpp/inference.hpp"
#include "dpp/io.hpp"
#include "dpp/kdpp.hpp"
#include "dpp/kernel.hpp"
#include "dpp/learning.hpp"
#include "dpp/linalg.hpp"
#include "dpp/oracle.hpp"
#include "dpp/projection.hpp"
#include "dpp/rng.hpp"
#include "dpp/sdpp.hpp"
#include "dpp/semiring.hpp"
#include "dpp/stats.hpp"
