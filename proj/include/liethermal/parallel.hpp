// Copyright 2026 The liethermal Authors
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

#include <cstdint>
#include <functional>

namespace liethermal {

/// Environment variable holding the worker-thread count.
inline constexpr const char* kThreadsEnv = "LIETHERMAL_THREADS";

/// Worker threads to use: `requested` when positive, else the environment
/// variable, else the hardware concurrency (at least 1).
int worker_count(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
/// claimed dynamically; callers write results by index so the outcome does
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Seed of substream `stream` derived from a run seed (SplitMix64 mixing).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace liethermal
