// Copyright 2026 The fedrec Authors.
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

#ifndef FEDREC_BASE_RANDOM_H_
#define FEDREC_BASE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace fedrec {

// Mixes a run seed with a list of stream keys (round, client id, purpose tag,
// ...) into an independent 64-bit seed. Used so every client/round/purpose has
// its own reproducible stream regardless of execution order.
uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> keys);

// Stream tags passed to DeriveSeed. Values are part of the reproducibility
// contract of saved experiments; do not renumber.
enum class StreamTag : uint64_t {
  kInit = 1,
  kSampling = 2,
  kClientLoss = 3,
  kGradientNoise = 4,
  kMonitor = 5,
  kServing = 6,
  kClicks = 7,
  kSynthetic = 8,
  kEval = 9,
};

inline uint64_t Tag(StreamTag tag) { return static_cast<uint64_t>(tag); }

// Seeded pseudo-random source. All distributions are implemented here on top
// of the raw 64-bit engine output, so draws are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformInt(uint64_t n);
  bool Bernoulli(double p) { return UniformOpen() < p; }
  double Normal();
  // Zero-mean Laplace with scale `scale` (variance 2 * scale^2). Returns 0
  // without consuming entropy when scale == 0.
  double Laplace(double scale);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct values from [0, n), in draw order. Requires k <= n.
  std::vector<int> SampleWithoutReplacement(int n, int k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace fedrec

#endif  // FEDREC_BASE_RANDOM_H_
