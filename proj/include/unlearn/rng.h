//
// Copyright 2026 The Unlearn Authors
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
//

#ifndef UNLEARN_RNG_H_
#define UNLEARN_RNG_H_

#include <cstdint>
#include <string_view>

namespace unlearn {

// SplitMix64 finalizer. Used to turn structured seed material into
// well-spread 64-bit seeds for std::mt19937_64.
uint64_t MixSeed(uint64_t value);

// Combines two seeds into one; order matters.
uint64_t CombineSeeds(uint64_t a, uint64_t b);

// Per-stream seed for (master_seed, trial, stream name). Streams are keyed by
// name, never by execution order, so reordering work keeps every stream fixed.
uint64_t DeriveSeed(uint64_t master_seed, uint64_t trial,
                    std::string_view stream);

}  // namespace unlearn

#endif  // UNLEARN_RNG_H_
