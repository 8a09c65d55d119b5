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
#include <vector>

#include "pgt/ensembles.hpp"
#include "pgt/matrix.hpp"
#include "pgt/rng.hpp"

namespace pgt {

/// m effects paired with labels: probability estimates p_i or single-shot
/// bits b_i. The label kind is homogeneous per set.
class TrainingSet {
 public:
  enum class LabelKind { probability, bit };

  static TrainingSet probabilities(std::vector<Effect> effects,
                                   std::vector<double> labels);
  static TrainingSet bits(std::vector<Effect> effects,
                          std::vector<std::uint8_t> labels);
  /// Empty set with an explicit dimension, for the vacuous-constraint paths.
  static TrainingSet empty(std::size_t dim, LabelKind kind);

  LabelKind label_kind() const { return kind_; }
  std::size_t size() const { return effects_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<Effect>& effects() const { return effects_; }
  const std::vector<double>& labels() const { return labels_; }

 private:
  TrainingSet(LabelKind kind, std::size_t dim, std::vector<Effect> effects,
              std::vector<double> labels);

  LabelKind kind_;
  std::size_t dim_;
  std::vector<Effect> effects_;
  std::vector<double> labels_;  // bits stored as 0.0 / 1.0
};

struct LearnerConfig {
  double eta = 0.01;       // feasibility slack
  int max_iters = 5000;
  double step_init = 1.0;
  double tol = 1e-10;
  std::optional<DensityMatrix> init_state;
};

struct LearnedHypothesis {
  DensityMatrix sigma;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_residual = 0.0;
};

/// Differentiable functional over density matrices: value plus Hermitian
/// gradient at any state.
struct MatrixLoss {
  std::function<double(const DensityMatrix&)> value;
  std::function<HermitianMatrix(const DensityMatrix&)> gradient;
};

using IterationObserver = std::function<void(int iteration, double loss)>;

/// Projected gradient with backtracking halving until an Armijo decrease.
/// Stops at loss <= tol, relative improvement < 1e-9, a projection fixed
/// point, or max_iters; returns the best iterate. The accepted loss sequence
/// is non-increasing by construction.
LearnedHypothesis projected_gradient_minimize(
    const MatrixLoss& loss, std::size_t dim, const LearnerConfig& config,
    const IterationObserver& observer = {});

/// Feasibility search for |Tr(E_i sigma) - p_i| <= eta, recast as minimizing
/// sum_i max(0, |Tr(E_i sigma) - p_i| - eta)^2. converged is true exactly
/// when the final loss is <= 1e-12 (all residuals within eta).
LearnedHypothesis learn_feasible(const TrainingSet& train,
                                 const LearnerConfig& config);

/// Minimizes sum_i (Tr(E_i sigma) - b_i)^2 over single-shot bit labels.
LearnedHypothesis learn_quadratic(const TrainingSet& train,
                                  const LearnerConfig& config);

/// Minimizes sum_i |Tr(E_i sigma) - b_i| by projected subgradient descent
/// with step step_init/sqrt(t); returns the best iterate seen.
LearnedHypothesis learn_absolute(const TrainingSet& train,
                                 const LearnerConfig& config);

/// Empirical fraction of n_test fresh effects with
/// |Tr(E sigma) - Tr(E rho)| > gamma.
double evaluate_generalization(const DensityMatrix& sigma,
                               const DensityMatrix& rho,
                               const MeasurementSource& source, double gamma,
                               int n_test, RngStream& rng);

struct PredictionMetrics {
  double mean_delta = 0.0;          // empirical E[Tr(E sigma)(1 - Tr(E rho)) +
                                    //             (1 - Tr(E sigma)) Tr(E rho)]
  double agreement = 0.0;           // 1 - mean_delta
  double guess_rule_success = 0.0;  // empirical E[(1 + |2 Tr(E rho) - 1|) / 2]
};

PredictionMetrics prediction_metrics(const DensityMatrix& sigma,
                                     const DensityMatrix& rho,
                                     const MeasurementSource& source,
                                     int n_test, RngStream& rng);

}  // namespace pgt
