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

#include "synthaudit/random.h"

#include <cmath>

namespace synthaudit {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t master, std::string_view component,
                    uint64_t counter) {
  // FNV-1a over the component name, then mixed with the master seed and the
  // counter.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : component) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(master ^ h) + counter);
}

double SampleUniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double SampleLaplace(Rng& rng, double scale) {
  // u in (-1/2, 1/2); avoid log(0) at the open end.
  double u = SampleUniform(rng) - 0.5;
  double a = 1.0 - 2.0 * std::fabs(u);
  if (a <= 0.0) a = 0x1.0p-53;
  return -scale * std::copysign(1.0, u) * std::log(a);
}

}  // namespace synthaudit
