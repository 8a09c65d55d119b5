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

#include "pgt/bounds.hpp"

#include <cmath>

#include "pgt/errors.hpp"

namespace pgt {

namespace {

constexpr double kMaxRepresentable = 4.0e18;

void check_common(const BoundQuery& q) {
  if (q.n_qubits < 1) throw ValidationError("bounds: n_qubits must be >= 1");
  if (!(q.gamma > 0.0 && q.gamma < 1.0)) {
    throw ValidationError("bounds: gamma must be in (0, 1)");
  }
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0)) {
    throw ValidationError("bounds: epsilon must be in (0, 1)");
  }
  if (!(q.eta >= 0.0 && q.eta < 1.0)) {
    throw ValidationError("bounds: eta must be in [0, 1)");
  }
  if (!(q.delta > 0.0 && q.delta < 1.0)) {
    throw ValidationError("bounds: delta must be in (0, 1)");
  }
  if (!(q.K > 0.0)) throw ValidationError("bounds: K must be > 0");
}

long long to_count(double value, bool ceiling, const char* formula) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string(formula) + ": bound is not finite");
  }
  if (value > kMaxRepresentable) {
    throw NumericalError(std::string(formula) +
                         ": bound exceeds representable integer range");
  }
  const double rounded = ceiling ? std::ceil(value) : std::floor(value);
  return static_cast<long long>(rounded);
}

}  // namespace

BoundResult m_upper_probability(const BoundQuery& q) {
  check_common(q);
  const double ge = q.gamma * q.epsilon;
  if (ge < 7.0 * q.eta) {
    throw ValidationError(
        "m_upper_probability: precondition gamma*epsilon >= 7*eta violated");
  }
  const double inv = 1.0 / (ge * ge);
  const double log_term = std::log(1.0 / ge);
  const double value =
      q.K * inv *
      (double(q.n_qubits) * inv * log_term * log_term + std::log(1.0 / q.delta));
  return BoundResult{to_count(value, true, "m_upper_probability"),
                     "upper_probability", q};
}

BoundResult m_upper_probability_refined(const BoundQuery& q) {
  check_common(q);
  if (!(q.gamma > q.eta)) {
    throw ValidationError(
        "m_upper_probability_refined: precondition gamma > eta violated");
  }
  const double margin = q.gamma - q.eta;
  const double log_term =
      std::log(double(q.n_qubits) / (margin * q.epsilon));
  const double value =
      q.K / q.epsilon *
      (double(q.n_qubits) / (margin * margin) * log_term * log_term +
       std::log(1.0 / q.delta));
  return BoundResult{to_count(value, true, "m_upper_probability_refined"),
                     "upper_probability_refined", q};
}

BoundResult m_upper_measure_once(const BoundQuery& q) {
  check_common(q);
  const double g2 = q.gamma * q.gamma;
  const double inv = 1.0 / (g2 * g2 * q.epsilon * q.epsilon);
  const double log_term = std::log(1.0 / (q.gamma * q.epsilon));
  const double value =
      q.K * inv *
      (double(q.n_qubits) * inv * log_term * log_term + std::log(1.0 / q.delta));
  return BoundResult{to_count(value, true, "m_upper_measure_once"),
                     "upper_measure_once", q};
}

BoundResult m_upper_prediction(const BoundQuery& q) {
  if (q.n_qubits < 1) throw ValidationError("bounds: n_qubits must be >= 1");
  if (!(q.delta > 0.0 && q.delta < 1.0)) {
    throw ValidationError("bounds: delta must be in (0, 1)");
  }
  if (!(q.K > 0.0)) throw ValidationError("bounds: K must be > 0");
  if (!(q.alpha > 0.0 && q.alpha <= 1.0)) {
    throw ValidationError("m_upper_prediction: alpha must be in (0, 1]");
  }
  const double a2 = q.alpha * q.alpha;
  const double log_term = std::log(1.0 / q.alpha);
  const double value =
      q.K / a2 *
      (double(q.n_qubits) / a2 * log_term * log_term + std::log(1.0 / q.delta));
  return BoundResult{to_count(value, true, "m_upper_prediction"),
                     "upper_prediction", q};
}

BoundResult m_lower(const BoundQuery& q) {
  check_common(q);
  if (q.model == BoundModel::prediction) {
    throw ValidationError("m_lower: prediction model unsupported");
  }
  const double gpow = q.model == BoundModel::measure_once
                          ? q.gamma * q.gamma * q.gamma * q.gamma
                          : q.gamma * q.gamma;
  const double value =
      q.K / q.epsilon *
      (double(q.n_qubits) / gpow + std::log(1.0 / q.delta));
  const char* id = q.model == BoundModel::measure_once ? "lower_measure_once"
                                                       : "lower_probability";
  return BoundResult{to_count(value, false, "m_lower"), id, q};
}

long long fat_dim_upper(int n_qubits, double gamma) {
  if (n_qubits < 1) throw ValidationError("fat_dim_upper: n_qubits must be >= 1");
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw ValidationError("fat_dim_upper: gamma must be in (0, 1/2]");
  }
  const double value = double(n_qubits) * std::log(2.0) / (2.0 * gamma * gamma);
  return to_count(value, false, "fat_dim_upper");
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binary_entropy: p must be in [0, 1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

long long tomography_param_count(int n_qubits) {
  if (n_qubits < 0) throw ValidationError("tomography_param_count: n must be >= 0");
  if (n_qubits > 31) {
    throw ValidationError("tomography_param_count: 4^n overflows beyond n = 31");
  }
  return 1LL << (2 * n_qubits);
}

}  // namespace pgt
