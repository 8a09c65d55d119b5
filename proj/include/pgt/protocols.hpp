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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pgt/learner.hpp"
#include "pgt/matrix.hpp"
#include "pgt/rng.hpp"

namespace pgt {

/// Exact probability that sequentially applying the given measurements to rho
/// rejects somewhere: iterate the unnormalized update rho <- sqrt(E) rho
/// sqrt(E) and return 1 minus the final trace.
double sequential_survival(const DensityMatrix& rho,
                           std::span<const Effect> effects);

/// Randomized-length certification sequence: the tests E_1..E_m, the length
/// cap T, the success threshold lambda and the Monte Carlo trial budget.
struct WitnessConfig {
  std::vector<Effect> effects;
  int T = 1;
  double lambda = 1.0;
  int trials = 10000;
};

struct WitnessOutcome {
  bool success = false;
  int failed_step = 0;  // 1-based step of rejection; 0 on success
  std::optional<DensityMatrix> state;
};

/// One run: draw t uniform in {1..T}, apply t uniformly chosen tests in
/// sequence, fail on the first rejection, otherwise return the held state.
/// Branches with probability below tol::kDegenerateBranch resolve to the
/// deterministic opposite outcome.
WitnessOutcome witness_protect_run(const DensityMatrix& rho0,
                                   const WitnessConfig& cfg, RngStream& rng);

struct WitnessStats {
  double success_prob = 0.0;
  double conditional_min_expectation = 0.0;  // min_i Tr(E_i sigma), sigma the
                                             // success-conditioned output mix
  double epsilon = 0.0;                      // max_i (1 - Tr(E_i rho0))
  double bound_success = 0.0;                // 1 - T sqrt(epsilon)
  double bound_conditional = 0.0;            // 1 - 2 sqrt(m / (lambda T))
  bool exact = false;                        // enumeration vs Monte Carlo
};

/// Success probability and conditional output mixture, exactly (averaged
/// measurement channel, applicable while m^T <= 1e6) or by Monte Carlo with
/// cfg.trials runs beyond that.
WitnessStats witness_protect_stats(const DensityMatrix& rho0,
                                   const WitnessConfig& cfg, RngStream& rng);

enum class VerifyResult { accept, reject, dont_know };

struct AdviceTest {
  Effect effect;
  int expected = 1;  // required outcome bit
};

/// Two-phase check of an untrusted advice state. Phase 1 applies a random
/// number t in {1..T} of uniformly chosen tests and returns dont_know on any
/// mismatch; phase 2 applies the decision effect to the surviving state and
/// accepts exactly when it fires.
VerifyResult verify_advice(const Effect& decision, const DensityMatrix& advice,
                           std::span<const AdviceTest> tests, int T,
                           RngStream& rng);

struct WeightedSupport {
  std::vector<std::uint32_t> values;
  std::vector<double> weights;  // nonnegative, sum 1

  std::uint32_t sample(RngStream& rng) const;
};

/// One-way communication instance: Alice's states rho_x, Bob's effects E_y,
/// the truth table f, a distribution over Bob's inputs, and the quantum
/// protocol error eta (Tr(E_y rho_x) >= 1 - eta when f = 1, <= eta when
/// f = 0).
class CommProblem {
 public:
  using StateFn = std::function<DensityMatrix(std::uint32_t)>;
  using EffectFn = std::function<Effect(std::uint32_t)>;
  using TruthFn = std::function<bool(std::uint32_t, std::uint32_t)>;
  using OverlapFn = std::function<double(std::uint32_t, std::uint32_t)>;

  CommProblem(int x_bits, int y_bits, std::size_t dim, StateFn states,
              EffectFn effects, TruthFn truth, OverlapFn exact_overlap,
              WeightedSupport y_distribution, double eta_protocol);

  int x_bits() const { return x_bits_; }
  int y_bits() const { return y_bits_; }
  std::size_t dim() const { return dim_; }

  DensityMatrix alice_state(std::uint32_t x) const { return states_(x); }
  Effect bob_effect(std::uint32_t y) const { return effects_(y); }
  bool truth(std::uint32_t x, std::uint32_t y) const { return truth_(x, y); }
  /// Closed-form Tr(E_y rho_x).
  double exact_overlap(std::uint32_t x, std::uint32_t y) const {
    return overlap_(x, y);
  }

  const WeightedSupport& y_distribution() const { return y_distribution_; }
  void set_y_distribution(WeightedSupport dist);

  double eta_protocol() const { return eta_protocol_; }

 private:
  int x_bits_;
  int y_bits_;
  std::size_t dim_;
  StateFn states_;
  EffectFn effects_;
  TruthFn truth_;
  OverlapFn overlap_;
  WeightedSupport y_distribution_;
  double eta_protocol_;
};

/// Equality instance from a seeded random linear binary code: states are the
/// +-1 fingerprint vectors of the codewords, effects their rank-1 projectors,
/// so Tr(E_y rho_x) = (1 - 2 dist(C(x), C(y)) / L)^2. Codes are redrawn (up
/// to 20 seeds) until every pairwise relative distance lies in [0.3, 0.7],
/// which pins the protocol error at eta <= 0.16; otherwise a construction
/// error is raised. The default distribution over y is uniform.
CommProblem make_fingerprint_protocol(int input_bits, int codeword_length,
                                      std::uint64_t seed);

struct OneWayOptions {
  double eta = 0.01;  // feasibility slack for Bob's hypothesis search
  int n_test = 400;
  LearnerConfig learner{};
};

struct OneWayResult {
  double test_error_rate = 0.0;
  int k_used = 0;
};

/// Classical simulation of the one-way protocol: Alice samples k inputs y_i
/// from D and sends (y_i, f(x, y_i)); Bob learns a hypothesis state from that
/// training set and predicts f(x, y) = [Tr(E_y sigma) >= 1/2] on fresh draws.
OneWayResult simulate_one_way(const CommProblem& problem, std::uint32_t x,
                              int k, RngStream& rng,
                              const OneWayOptions& options = {});

}  // namespace pgt
