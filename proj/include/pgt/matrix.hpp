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
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pgt/constants.hpp"
#include "pgt/errors.hpp"

namespace pgt {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The mutable workhorse for intermediate
/// computation (products, eigenvector accumulation, Kraus updates).
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

  static CMatrix identity(std::size_t dim);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  CMatrix adjoint() const;
  cplx trace() const;
  double frobenius_norm() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);

/// Kronecker product, used to assemble multi-qubit operators.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Square complex matrix with conjugate symmetry, immutable after
/// construction. Storage is shared between copies, so passing these by value
/// is cheap and concurrent reads are safe.
class HermitianMatrix {
 public:
  static HermitianMatrix zero(std::size_t dim);
  static HermitianMatrix identity(std::size_t dim);

  /// Validates conjugate symmetry entrywise (tolerance tol::kHermitianEntry)
  /// and throws ValidationError on failure.
  static HermitianMatrix from_entries(std::size_t dim, std::vector<cplx> entries);
  static HermitianMatrix from_cmatrix(const CMatrix& m);

  /// Wraps entries the caller guarantees to be exactly Hermitian (e.g. sums
  /// of Hermitian matrices with real coefficients). No validation.
  static HermitianMatrix from_entries_unchecked(std::size_t dim,
                                                std::vector<cplx> entries);

  std::size_t dim() const { return dim_; }
  const cplx& at(std::size_t r, std::size_t c) const {
    return (*data_)[r * dim_ + c];
  }
  std::span<const cplx> entries() const { return {data_->data(), data_->size()}; }

  double trace_real() const;
  double frobenius_norm() const;
  CMatrix to_cmatrix() const;

  HermitianMatrix scaled(double s) const;
  friend HermitianMatrix operator+(const HermitianMatrix& a,
                                   const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a,
                                   const HermitianMatrix& b);

 private:
  HermitianMatrix(std::size_t dim, std::shared_ptr<const std::vector<cplx>> data)
      : dim_(dim), data_(std::move(data)) {}

  std::size_t dim_ = 0;
  std::shared_ptr<const std::vector<cplx>> data_;
};

/// Hermitian PSD trace-one matrix: the state rho and every hypothesis sigma.
/// Construction checks trace and the cheap necessary spectral conditions;
/// check_density_invariants performs the full eigenvalue check.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix m);

  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix pure(std::span<const cplx> amplitudes);

  const HermitianMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }

 private:
  HermitianMatrix matrix_;
};

/// Two-outcome measurement element: Hermitian with spectrum in [0, 1].
/// Accepts a state rho with probability Tr(E rho).
class Effect {
 public:
  explicit Effect(HermitianMatrix m);

  static Effect identity(std::size_t dim);
  static Effect zero(std::size_t dim);
  /// I - E, the complementary outcome.
  Effect complement() const;

  const HermitianMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }

  /// True when both wrap the same underlying storage. Used to group repeated
  /// training effects without comparing entries.
  bool shares_storage(const Effect& other) const {
    return matrix_.entries().data() == other.matrix_.entries().data();
  }

 private:
  HermitianMatrix matrix_;
};

/// Full spectral invariant checks; used by the fuzz suites and at trust
/// boundaries. Cost one eigendecomposition each.
bool check_density_invariants(const DensityMatrix& rho,
                              double tol = tol::kValidation);
bool check_effect_invariants(const Effect& e, double tol = tol::kValidation);

}  // namespace pgt
