// Copyright 2026 The qpv Authors
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

// Umbrella header.

#ifndef QPV_QPV_HPP
#define QPV_QPV_HPP

#include "qpv/core.hpp"
#include "qpv/tensor.hpp"
#include "qpv/pauli.hpp"
#include "qpv/clifford.hpp"
#include "qpv/hypergraph.hpp"
#include "qpv/channels.hpp"
#include "qpv/strategies.hpp"
#include "qpv/pmpv.hpp"
#include "qpv/oracle.hpp"
#include "qpv/rng.hpp"
#include "qpv/simulator.hpp"
#include "qpv/meas_verify.hpp"
#include "qpv/io.hpp"

#endif  // QPV_QPV_HPP
