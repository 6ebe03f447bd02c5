// Copyright 2026 The nogo-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "nogo_lab/errors.hpp"
#include "nogo_lab/opcore.hpp"
#include "nogo_lab/random.hpp"
#include "nogo_lab/quantum.hpp"
#include "nogo_lab/report.hpp"
#include "nogo_lab/hvmodel.hpp"
#include "nogo_lab/nogo.hpp"
#include "nogo_lab/rational_simplex.hpp"
#include "nogo_lab/feasibility.hpp"
#include "nogo_lab/scenarios.hpp"
#include "nogo_lab/sampling.hpp"
#include "nogo_lab/io.hpp"
