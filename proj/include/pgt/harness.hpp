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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgt/learner.hpp"
#include "pgt/matrix.hpp"

namespace pgt {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class ExperimentKind {
  generalization_sweep,
  measure_once_sweep,
  adaptive,
  lower_bound,
};

enum class LearnerRule { feasible, quadratic, absolute };

struct StateSpec {
  enum class Type { pure, mixed, hard_instance };
  Type type = Type::pure;
  int rank = 1;        // mixed
  int k = 2;           // hard_instance
  double gamma = 0.2;  // hard_instance
};

struct LabelSpec {
  enum class Mode { exact, estimate };
  Mode mode = Mode::exact;
  int copies = 100;  // estimate mode
};

/// Adaptive rounds: a source per outcome-prefix branch (key = the observed
/// bits so far, e.g. "", "0", "01") with the experiment source as fallback,
/// plus the truth table of the Boolean f over the r outcome bits, indexed by
/// z_1 + 2 z_2 + ... (z_1 the first round's outcome).
struct AdaptiveSpec {
  int rounds = 1;
  std::vector<int> truth_table;
  std::map<std::string, MeasurementSource> branch_sources;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::generalization_sweep;
  int n_qubits = 1;
  StateSpec state;
  MeasurementSource source;
  LabelSpec labels;
  std::vector<int> m_values;
  double gamma = 0.1;
  double eta = 0.01;
  double epsilon = 0.1;
  int n_test = 500;
  std::vector<std::uint64_t> seeds;
  LearnerRule rule = LearnerRule::feasible;
  bool rule_explicit = false;  // whether the config named a rule
  LearnerConfig learner;
  std::optional<AdaptiveSpec> adaptive;
  bool control_force_sigma = false;  // control rows: sigma forced to rho
};

struct ReportRow {
  std::uint64_t seed = 0;
  int m = 0;
  std::optional<double> test_error;
  double final_loss = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_residual = 0.0;
  bool failed = false;  // the row itself errored out
  std::string error;
  std::optional<bool> trial_failed;   // lower-bound rows: learner missed the
                                      // (gamma, epsilon) target
  std::optional<double> estimate;     // adaptive rows
  std::optional<double> exact_value;  // adaptive rows
  double wall_ms = 0.0;               // excluded from report bodies
};

struct AggregateRow {
  int m = 0;
  double median_test_error = 0.0;
  double median_final_loss = 0.0;
  double failure_rate = 0.0;
};

struct Report {
  std::string artifact_version = kArtifactVersion;
  ExperimentSpec spec;
  std::string rng_scheme;
  std::vector<ReportRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Product-state family that is margin-shattered around 1/2 with exact
/// expectations: Tr(E_i rho_y) = 1/2 + gamma (2 y_i - 1), with the skewed
/// sampling distribution putting weight 1 - 4 epsilon on E_1 and the rest
/// uniform on the others.
class HardInstance {
 public:
  HardInstance(int k, double gamma, double epsilon);

  int k() const { return k_; }
  double gamma() const { return gamma_; }
  const std::vector<Effect>& effects() const { return effects_; }
  const std::vector<double>& weights() const { return weights_; }

  DensityMatrix state_for(std::uint32_t y) const;
  double exact_expectation(int i, std::uint32_t y) const;

 private:
  int k_;
  double gamma_;
  std::vector<Effect> effects_;
  std::vector<double> weights_;
};

HardInstance make_hard_instance(int k, double gamma, double epsilon);

Report run_generalization_sweep(const ExperimentSpec& spec);
Report run_measure_once_sweep(const ExperimentSpec& spec);
Report run_adaptive_experiment(const ExperimentSpec& spec);
Report run_lower_bound_experiment(const ExperimentSpec& spec);
/// Dispatch on spec.kind.
Report run_experiment(const ExperimentSpec& spec);

namespace harness_detail {

/// One adaptive strategy sample: an effect per outcome-prefix node, rounds
/// deep, laid out breadth-first.
std::vector<Effect> draw_strategy(const ExperimentSpec& spec, RngStream& rng);

/// The acceptance element of the f = 1 event: sum over accepted outcome
/// strings of the tensor product of per-round branch effects.
Effect assemble_adaptive_effect(const std::vector<Effect>& nodes, int rounds,
                                const std::vector<int>& truth_table);

/// Pr[f = 1] for one strategy by enumerating outcome paths with exact branch
/// probabilities against rho.
double enumerate_adaptive_paths(const DensityMatrix& rho,
                                const std::vector<Effect>& nodes, int rounds,
                                const std::vector<int>& truth_table);

}  // namespace harness_detail

}  // namespace pgt
