// Copyright the pgt authors
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

#include <complex>
#include <cstdint>

namespace pgt {

/// Counter-based splittable generator keyed by (seed, stream_id, counter).
/// Identical keys yield identical draw sequences regardless of execution
/// order, so parallel trials reproduce serial results. Each draw applies a
/// 64-bit finalizer to base + counter.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian();
  /// Standard complex Gaussian: (x + iy)/sqrt(2) with x, y standard normal.
  std::complex<double> gaussian_complex();

  /// Derives an independent stream keyed by this stream's identity and id.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace pgt
