// SPDX-License-Identifier: Apache-2.0
//
// cmamimo: characteristic-mode degrees-of-freedom analysis for MIMO antennas
// Copyright (C) 2026 The cmamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CMAMIMO_CMAMIMO_HPP
#define CMAMIMO_CMAMIMO_HPP

#include "channel.hpp"
#include "cma.hpp"
#include "config.hpp"
#include "dof.hpp"
#include "efie.hpp"
#include "ga.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "pipeline.hpp"
#include "plot.hpp"
#include "quadrature.hpp"
#include "types.hpp"

#endif
