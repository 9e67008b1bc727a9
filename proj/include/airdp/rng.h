// Copyright 2026 The airdp Authors
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

#ifndef AIRDP_RNG_H_
#define AIRDP_RNG_H_

#include <cstdint>
#include <optional>
#include <random>

namespace airdp {

// Every random draw in a simulation belongs to exactly one purpose. Streams
// for different purposes never overlap, so e.g. switching the estimator mode
// leaves the participant draws untouched.
enum class StreamPurpose : uint64_t {
  kSampling = 1,
  kFading = 2,
  kPerturbation = 3,
  kReceiverNoise = 4,
  kMinibatch = 5,
  kTaskData = 6,
  kFadingInit = 7,
};

// Identifies one independent random stream. Streams are a pure function of the
// key, which keeps results independent of thread scheduling.
struct StreamKey {
  uint64_t master_seed = 0;
  uint64_t trial = 0;
  uint64_t round = 0;
  uint64_t user = 0;
  StreamPurpose purpose = StreamPurpose::kSampling;
};

// SplitMix64-based hash of the full key.
uint64_t DeriveStreamSeed(const StreamKey& key);

// Deterministic random stream. Built on std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions are implemented here rather than
// taken from <random> so draws are identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : engine_(seed) {}
  explicit RngStream(const StreamKey& key) : engine_(DeriveStreamSeed(key)) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Standard normal (Marsaglia polar method).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformIndex(uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace airdp

#endif  // AIRDP_RNG_H_
