// Copyright 2026 The gnsstopo Authors
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

#include "gnsstopo/branch_and_bound.hpp"
#include "gnsstopo/fcp.hpp"
#include "gnsstopo/hmwm.hpp"
#include "gnsstopo/ilp_exact.hpp"
#include "gnsstopo/ilp_model.hpp"
#include "gnsstopo/matching.hpp"
#include "gnsstopo/railp.hpp"
#include "gnsstopo/report_io.hpp"
#include "gnsstopo/routing.hpp"
#include "gnsstopo/scenario.hpp"
#include "gnsstopo/scenario_io.hpp"
#include "gnsstopo/simulator.hpp"
#include "gnsstopo/synthetic.hpp"
