// Copyright 2026 The FedHybrid Authors
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

#ifndef FEDHYBRID_FEDHYBRID_HPP_
#define FEDHYBRID_FEDHYBRID_HPP_

// Umbrella header for the hybrid-protection federated learning simulator.

#include "fedhybrid/dp/mechanism.hpp"
#include "fedhybrid/dp/normal.hpp"
#include "fedhybrid/errors.hpp"
#include "fedhybrid/experiment/config.hpp"
#include "fedhybrid/experiment/runner.hpp"
#include "fedhybrid/fl/modes.hpp"
#include "fedhybrid/fl/protocol.hpp"
#include "fedhybrid/he/backend.hpp"
#include "fedhybrid/he/embedding.hpp"
#include "fedhybrid/he/modmath.hpp"
#include "fedhybrid/he/ntt.hpp"
#include "fedhybrid/he/pack.hpp"
#include "fedhybrid/he/params.hpp"
#include "fedhybrid/he/rns.hpp"
#include "fedhybrid/he/scheme.hpp"
#include "fedhybrid/he/serialize.hpp"
#include "fedhybrid/model.hpp"
#include "fedhybrid/param_vector.hpp"
#include "fedhybrid/rng.hpp"
#include "fedhybrid/synth/cohort.hpp"

#endif  // FEDHYBRID_FEDHYBRID_HPP_
