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
#include <string>

namespace pgt {

enum class BoundModel { probability_labels, measure_once, prediction };

/// Inputs to the sample-complexity calculators. K is the multiplicative
/// constant every bound carries; it is unspecified by the theory, defaults to
/// 1 and is always echoed in results. Natural logarithms throughout.
struct BoundQuery {
  int n_qubits = 1;
  double gamma = 0.1;
  double epsilon = 0.1;
  double eta = 0.0;
  double delta = 0.1;
  double K = 1.0;
  BoundModel model = BoundModel::probability_labels;
  double alpha = 0.0;  // prediction model only
};

struct BoundResult {
  long long m = 0;
  std::string formula_id;
  BoundQuery inputs;
};

/// ceil( K/(g^2 e^2) * ( n/(g^2 e^2) * ln^2(1/(g e)) + ln(1/delta) ) ).
/// Requires gamma * epsilon >= 7 * eta.
BoundResult m_upper_probability(const BoundQuery& q);

/// ceil( K/e * ( n/(g-eta)^2 * ln^2( n/((g-eta) e) ) + ln(1/delta) ) ).
/// Requires gamma > eta. Better epsilon dependence, extra log^2 n factor.
BoundResult m_upper_probability_refined(const BoundQuery& q);

/// Single-shot-bit variant:
/// ceil( K/(g^4 e^2) * ( n/(g^4 e^2) * ln^2(1/(g e)) + ln(1/delta) ) ).
BoundResult m_upper_measure_once(const BoundQuery& q);

/// Outcome-prediction variant in terms of the agreement slack alpha:
/// ceil( K/a^2 * ( n/a^2 * ln^2(1/a) + ln(1/delta) ) ).
BoundResult m_upper_prediction(const BoundQuery& q);

/// floor( K/e * ( n/g^c + ln(1/delta) ) ) with c = 2 for probability labels
/// and c = 4 for the measure-once model.
BoundResult m_lower(const BoundQuery& q);

/// floor( n * ln(2) / (2 g^2) ): the margin-dimension cap for n-qubit states.
/// gamma must lie in (0, 1/2].
long long fat_dim_upper(int n_qubits, double gamma);

/// -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
double binary_entropy(double p);

/// 4^n, the parameter count of a 2^n x 2^n density matrix. Errors beyond
/// n = 31.
long long tomography_param_count(int n_qubits);

}  // namespace pgt
