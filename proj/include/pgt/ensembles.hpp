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

#include <span>
#include <utility>
#include <vector>

#include "pgt/matrix.hpp"
#include "pgt/rng.hpp"

namespace pgt {

/// A named, sampleable distribution over Effects. Sampling a kind other than
/// finite_list draws fresh random effects; finite_list picks from a fixed
/// weighted set. A positive noise_scale wraps any kind with a Gaussian
/// Hermitian perturbation followed by spectrum clamping to [0, 1].
struct MeasurementSource {
  enum class Kind { haar_projector, pauli_local, spectral, finite_list };

  Kind kind = Kind::haar_projector;
  int n_qubits = 1;
  int rank = 1;              // haar_projector only
  double noise_scale = 0.0;  // 0 disables the perturbation wrapper
  std::vector<Effect> effects;   // finite_list only
  std::vector<double> weights;   // finite_list only

  static MeasurementSource haar_projector(int n_qubits, int rank,
                                          double noise_scale = 0.0);
  static MeasurementSource pauli_local(int n_qubits, double noise_scale = 0.0);
  static MeasurementSource spectral(int n_qubits, double noise_scale = 0.0);
  static MeasurementSource finite_list(std::vector<Effect> effects,
                                       std::vector<double> weights,
                                       double noise_scale = 0.0);

  std::size_t dim() const;
};

/// Haar-random pure state: normalized vector of i.i.d. standard complex
/// Gaussians, returned as a rank-1 projector. 1 <= n_qubits <= 10.
DensityMatrix sample_pure_state(int n_qubits, RngStream& rng);

/// rho = A A^dagger / Tr(A A^dagger) for a 2^n x rank complex Gaussian A.
DensityMatrix sample_mixed_state(int n_qubits, int rank, RngStream& rng);

Effect sample_effect(const MeasurementSource& source, RngStream& rng);

/// Bernoulli(Tr(E rho)).
int sample_outcome(const Effect& e, const DensityMatrix& rho, RngStream& rng);

/// Empirical frequency of 1-outcomes over `copies` independent draws.
double estimate_probability(const Effect& e, const DensityMatrix& rho,
                            int copies, RngStream& rng);

/// k-outcome to two-outcome reduction: uniformly chosen index j plus the
/// element E^(j), to be treated as the pair {E^(j), I - E^(j)}. The POVM must
/// sum to the identity within tol::kPovmCompleteness.
std::pair<std::size_t, Effect> reduce_k_outcome(std::span<const Effect> povm,
                                                RngStream& rng);

}  // namespace pgt
