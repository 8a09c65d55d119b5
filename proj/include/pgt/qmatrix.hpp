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
#include <vector>

#include "pgt/matrix.hpp"

namespace pgt {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // orthonormal columns, values[k] <-> column k
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices. Sweeps until the
/// off-diagonal Frobenius norm drops below tol::kJacobiOffNorm or
/// tol::kJacobiMaxSweeps sweeps have run.
EigenDecomposition hermitian_eig(const HermitianMatrix& h);

/// Tr(E rho), clamped into [0, 1] when within tol::kValidation of the
/// boundary. Values further outside raise NumericalError.
double expectation(const Effect& e, const DensityMatrix& rho);

/// Euclidean projection onto the probability simplex (sort-then-threshold).
std::vector<double> simplex_project(std::span<const double> v);

/// Frobenius projection onto the trace-one PSD set: eigendecompose, project
/// the spectrum onto the simplex, reassemble.
DensityMatrix project_to_density(const HermitianMatrix& h);

/// PSD square root. Eigenvalues within -tol::kValidation of zero are clamped
/// to zero; anything further negative raises ValidationError.
HermitianMatrix psd_sqrt(const Effect& e);

struct MeasurementBranch {
  double probability;
  DensityMatrix state;
};

/// State update for the Kraus pair (sqrt(E), sqrt(I-E)). outcome 1 yields
/// (p, sqrt(E) rho sqrt(E) / p) with p = Tr(E rho); outcome 0 the complement.
/// Requesting a branch with probability below tol::kDegenerateBranch raises
/// DegenerateBranchError.
MeasurementBranch post_measurement_state(const DensityMatrix& rho,
                                         const Effect& e, int outcome);

namespace detail {
/// sum_k w[k] * v_k v_k^dagger over columns of v, skipping exact zeros.
HermitianMatrix assemble_from_spectrum(const CMatrix& vectors,
                                       std::span<const double> weights);
}  // namespace detail

}  // namespace pgt
