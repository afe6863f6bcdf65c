// Copyright 2026 The hmmqec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMMQEC_RNG_HPP
#define HMMQEC_RNG_HPP

#include "hmmqec/numkit.hpp"

#include <array>
#include <cstdint>

namespace hmmqec {

/// Counter-based random stream keyed by (seed, stream id).
///
/// Draws come from Philox4x32-10 with the seed as key and the stream id in
/// the upper half of the 128-bit counter, so any (seed, stream) pair yields
/// the same sequence on every platform and streams never overlap for fewer
/// than 2^64 blocks. Normal variates use Box-Muller on our own uniforms
/// rather than <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Child stream whose id is a hash of (this stream id, index). Children of
  /// distinct indices, and of distinct parents, are independent streams.
  RngStream split(std::uint64_t index) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal.
  double normal();
  /// Complex normal with independent real/imaginary parts of variance 1/2.
  Complex complex_normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// One Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

namespace numkit {

/// Haar-random unit vector of dimension `dim` (normalized Ginibre column).
ComplexVector haar_state(int dim, RngStream& rng);

/// Matrix of i.i.d. complex standard normals (real and imaginary variance 1/2).
ComplexMatrix ginibre(int rows, int cols, RngStream& rng);

}  // namespace numkit
}  // namespace hmmqec

#endif  // HMMQEC_RNG_HPP
