// Copyright 2026 The lrperc Authors
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

// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
//
// Every draw is a pure function of (seed, stream, position), so replicas and
// vertices can be processed in any order or on any thread and still see the
// same numbers.

#ifndef LRPERC_RNG_HPP_
#define LRPERC_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace lrperc {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

// Stream namespaces. The top byte of a stream id names its purpose so that,
// say, replica 3 and bootstrap resample 3 never share numbers.
enum class StreamDomain : std::uint64_t {
  site_field = 1,
  replica = 2,
  bootstrap = 3,
  verification = 4,
  seed_derivation = 5,
  bond_field = 6,
};

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t id) {
  return (static_cast<std::uint64_t>(domain) << 56) ^
         (id & ((std::uint64_t{1} << 56) - 1));
}

// 64-bit output block `block` of stream (seed, stream): two words per
// Philox call, selected by the low bit.
constexpr std::uint64_t philox_word(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t position) {
  const std::uint64_t block = position >> 1;
  const PhiloxCounter out = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(stream),
       static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::size_t half = (position & 1) * 2;
  return (std::uint64_t{out[half]} << 32) | out[half + 1];
}

constexpr double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double in [0, 1) at a fixed position of a stream.
constexpr double uniform_at(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t position) {
  return to_unit_interval(philox_word(seed, stream, position));
}

// Child seed for an independent sub-study (graph ordinal, size index, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return philox_word(seed, stream_id(StreamDomain::seed_derivation, tag), 0);
}

// Sequential view of one stream; satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if ((position_ & 1) == 0) {
      const std::uint64_t block = position_ >> 1;
      buffer_ = philox4x32(
          {static_cast<std::uint32_t>(block),
           static_cast<std::uint32_t>(block >> 32),
           static_cast<std::uint32_t>(stream_),
           static_cast<std::uint32_t>(stream_ >> 32)},
          {static_cast<std::uint32_t>(seed_),
           static_cast<std::uint32_t>(seed_ >> 32)});
    }
    const std::size_t half = (position_ & 1) * 2;
    ++position_;
    return (std::uint64_t{buffer_[half]} << 32) | buffer_[half + 1];
  }

  double uniform() { return to_unit_interval((*this)()); }

  // Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = (*this)();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  PhiloxCounter buffer_{};
};

}  // namespace lrperc

#endif  // LRPERC_RNG_HPP_
