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

#include "pgt/matrix.hpp"

#include <cmath>
#include <utility>

#include "pgt/qmatrix.hpp"

namespace pgt {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("CMatrix: entry count does not match shape");
  }
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      out(c, r) = std::conj((*this)(r, c));
    }
  }
  return out;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  std::size_t n = rows_ < cols_ ? rows_ : cols_;
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ValidationError("CMatrix: shape mismatch in addition");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ValidationError("CMatrix: shape mismatch in subtraction");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(double s) {
  for (cplx& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ValidationError("CMatrix: shape mismatch in product");
  }
  CMatrix out(a.rows(), b.cols());
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_dim; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{0.0, 0.0}) continue;
      const cplx* brow = &b.raw()[k * m];
      cplx* orow = &out.raw()[i * m];
      for (std::size_t j = 0; j < m; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

CMatrix operator+(CMatrix a, const CMatrix& b) {
  a += b;
  return a;
}

CMatrix operator-(CMatrix a, const CMatrix& b) {
  a -= b;
  return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

namespace {

void check_hermitian(std::size_t dim, const std::vector<cplx>& e) {
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      const cplx delta = e[r * dim + c] - std::conj(e[c * dim + r]);
      if (std::abs(delta) > tol::kHermitianEntry) {
        throw ValidationError("HermitianMatrix: conjugate symmetry violated");
      }
    }
  }
}

}  // namespace

HermitianMatrix HermitianMatrix::zero(std::size_t dim) {
  if (dim < 1) throw ValidationError("HermitianMatrix: dim must be >= 1");
  return from_entries_unchecked(dim, std::vector<cplx>(dim * dim));
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  if (dim < 1) throw ValidationError("HermitianMatrix: dim must be >= 1");
  std::vector<cplx> e(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
  return from_entries_unchecked(dim, std::move(e));
}

HermitianMatrix HermitianMatrix::from_entries(std::size_t dim,
                                              std::vector<cplx> entries) {
  if (dim < 1) throw ValidationError("HermitianMatrix: dim must be >= 1");
  if (entries.size() != dim * dim) {
    throw ValidationError("HermitianMatrix: entry count does not match dim");
  }
  check_hermitian(dim, entries);
  return from_entries_unchecked(dim, std::move(entries));
}

HermitianMatrix HermitianMatrix::from_cmatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ValidationError("HermitianMatrix: matrix must be square");
  }
  return from_entries(m.rows(), m.raw());
}

HermitianMatrix HermitianMatrix::from_entries_unchecked(
    std::size_t dim, std::vector<cplx> entries) {
  return HermitianMatrix(
      dim, std::make_shared<const std::vector<cplx>>(std::move(entries)));
}

double HermitianMatrix::trace_real() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += at(i, i).real();
  return t;
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : *data_) s += std::norm(z);
  return std::sqrt(s);
}

CMatrix HermitianMatrix::to_cmatrix() const {
  return CMatrix(dim_, dim_, *data_);
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
  std::vector<cplx> e(*data_);
  for (cplx& z : e) z *= s;
  return from_entries_unchecked(dim_, std::move(e));
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("HermitianMatrix: dim mismatch in addition");
  }
  std::vector<cplx> e(*a.data_);
  const std::vector<cplx>& be = *b.data_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += be[i];
  return HermitianMatrix::from_entries_unchecked(a.dim(), std::move(e));
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("HermitianMatrix: dim mismatch in subtraction");
  }
  std::vector<cplx> e(*a.data_);
  const std::vector<cplx>& be = *b.data_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= be[i];
  return HermitianMatrix::from_entries_unchecked(a.dim(), std::move(e));
}

DensityMatrix::DensityMatrix(HermitianMatrix m) : matrix_(std::move(m)) {
  const double tr = matrix_.trace_real();
  if (std::abs(tr - 1.0) > tol::kValidation) {
    throw ValidationError("DensityMatrix: trace must be 1");
  }
  for (std::size_t i = 0; i < matrix_.dim(); ++i) {
    if (matrix_.at(i, i).real() < -tol::kValidation) {
      throw ValidationError("DensityMatrix: negative diagonal entry");
    }
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(HermitianMatrix::identity(dim).scaled(1.0 / double(dim)));
}

DensityMatrix DensityMatrix::pure(std::span<const cplx> amplitudes) {
  const std::size_t dim = amplitudes.size();
  if (dim < 1) throw ValidationError("DensityMatrix: empty amplitude vector");
  double norm2 = 0.0;
  for (const cplx& a : amplitudes) norm2 += std::norm(a);
  if (norm2 <= 0.0 || !std::isfinite(norm2)) {
    throw ValidationError("DensityMatrix: amplitude vector not normalizable");
  }
  std::vector<cplx> e(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      e[r * dim + c] = amplitudes[r] * std::conj(amplitudes[c]) / norm2;
    }
  }
  return DensityMatrix(HermitianMatrix::from_entries_unchecked(dim, std::move(e)));
}

Effect::Effect(HermitianMatrix m) : matrix_(std::move(m)) {
  for (std::size_t i = 0; i < matrix_.dim(); ++i) {
    const double d = matrix_.at(i, i).real();
    if (d < -tol::kValidation || d > 1.0 + tol::kValidation) {
      throw ValidationError("Effect: diagonal entry outside [0, 1]");
    }
  }
}

Effect Effect::identity(std::size_t dim) {
  return Effect(HermitianMatrix::identity(dim));
}

Effect Effect::zero(std::size_t dim) {
  return Effect(HermitianMatrix::zero(dim));
}

Effect Effect::complement() const {
  return Effect(HermitianMatrix::identity(dim()) - matrix_);
}

bool check_density_invariants(const DensityMatrix& rho, double tol) {
  if (std::abs(rho.matrix().trace_real() - 1.0) > tol) return false;
  const EigenDecomposition eig = hermitian_eig(rho.matrix());
  for (double v : eig.values) {
    if (v < -tol) return false;
  }
  return true;
}

bool check_effect_invariants(const Effect& e, double tol) {
  const EigenDecomposition eig = hermitian_eig(e.matrix());
  for (double v : eig.values) {
    if (v < -tol || v > 1.0 + tol) return false;
  }
  return true;
}

}  // namespace pgt
