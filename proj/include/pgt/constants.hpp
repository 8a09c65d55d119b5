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

namespace pgt::tol {

// Single source of truth for the numeric tolerances used by type invariants,
// solvers and property tests.

inline constexpr double kValidation = 1e-9;         // trace / spectrum invariants
inline constexpr double kReconstruction = 1e-10;    // spectral reconstruction target
inline constexpr double kHermitianEntry = 1e-12;    // entrywise conjugate symmetry
inline constexpr double kJacobiOffNorm = 1e-12;     // eigensolver off-diagonal target
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kDegenerateBranch = 1e-12;  // measurement branch floor
inline constexpr double kPovmCompleteness = 1e-8;   // k-outcome completeness gate
inline constexpr double kWeightSum = 1e-12;         // finite-list weight normalization

}  // namespace pgt::tol
