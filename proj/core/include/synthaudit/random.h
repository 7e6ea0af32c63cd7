// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHAUDIT_RANDOM_H_
#define SYNTHAUDIT_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace synthaudit {

using Rng = std::mt19937_64;

// Derives an independent sub-seed from a master seed, a component name and a
// counter. Every component that needs randomness gets its stream from here so
// that a single 64-bit master seed reproduces a whole experiment.
uint64_t DeriveSeed(uint64_t master, std::string_view component,
                    uint64_t counter = 0);

inline Rng MakeRng(uint64_t master, std::string_view component,
                   uint64_t counter = 0) {
  return Rng(DeriveSeed(master, component, counter));
}

// Laplace(0, scale) by inverse CDF.
double SampleLaplace(Rng& rng, double scale);

// Uniform double in [0, 1).
double SampleUniform(Rng& rng);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_RANDOM_H_
