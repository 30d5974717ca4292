// Copyright (c) 2026, The traject Authors
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

#include "traject/band.hpp"
#include "traject/error.hpp"
#include "traject/io.hpp"
#include "traject/multiscale.hpp"
#include "traject/parallel.hpp"
#include "traject/pca.hpp"
#include "traject/projection.hpp"
#include "traject/ranking.hpp"
#include "traject/rdp.hpp"
#include "traject/report.hpp"
#include "traject/svg.hpp"
#include "traject/types.hpp"
