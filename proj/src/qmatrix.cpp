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

#include "pgt/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pgt {

namespace {

double off_diagonal_norm(const std::vector<cplx>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) s += std::norm(a[r * n + c]);
  }
  return std::sqrt(2.0 * s);
}

HermitianMatrix hermitian_part(const CMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<cplx> e(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    e[r * n + r] = m(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx mean = 0.5 * (m(r, c) + std::conj(m(c, r)));
      e[r * n + c] = mean;
      e[c * n + r] = std::conj(mean);
    }
  }
  return HermitianMatrix::from_entries_unchecked(n, std::move(e));
}

}  // namespace

EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  // Work on an exactly symmetrized copy; roundoff-level asymmetry in the
  // input would otherwise leak into the rotations.
  std::vector<cplx> a(h.entries().begin(), h.entries().end());
  for (std::size_t r = 0; r < n; ++r) {
    a[r * n + r] = a[r * n + r].real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx mean = 0.5 * (a[r * n + c] + std::conj(a[c * n + r]));
      a[r * n + c] = mean;
      a[c * n + r] = std::conj(mean);
    }
  }

  CMatrix v = CMatrix::identity(n);

  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) < tol::kJacobiOffNorm) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a[p * n + q];
        const double r = std::abs(apq);
        if (r <= 1e-300) {
          a[p * n + q] = 0.0;
          a[q * n + p] = 0.0;
          continue;
        }
        const cplx w = apq / r;
        const double tau = (a[q * n + q].real() - a[p * n + p].real()) / (2.0 * r);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx sw = s * w;
        const cplx swc = s * std::conj(w);

        // A <- G^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const cplx ap = a[p * n + k];
          const cplx aq = a[q * n + k];
          a[p * n + k] = c * ap - sw * aq;
          a[q * n + k] = swc * ap + c * aq;
        }
        // A <- A G
        for (std::size_t k = 0; k < n; ++k) {
          const cplx ap = a[k * n + p];
          const cplx aq = a[k * n + q];
          a[k * n + p] = c * ap - swc * aq;
          a[k * n + q] = sw * ap + c * aq;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        a[p * n + p] = a[p * n + p].real();
        a[q * n + q] = a[q * n + q].real();

        // V <- V G
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vp = v(k, p);
          const cplx vq = v(k, q);
          v(k, p) = c * vp - swc * vq;
          v(k, q) = sw * vp + c * vq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i].real() < a[j * n + j].real();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a[src * n + src].real();
    for (std::size_t row = 0; row < n; ++row) out.vectors(row, k) = v(row, src);
  }
  return out;
}

double expectation(const Effect& e, const DensityMatrix& rho) {
  if (e.dim() != rho.dim()) {
    throw ValidationError("expectation: dimension mismatch");
  }
  // Tr(E rho) = sum_jk E_jk conj(rho_jk) for Hermitian rho; reduces to a real
  // dot product over the flat storage.
  std::span<const cplx> ee = e.matrix().entries();
  std::span<const cplx> re = rho.matrix().entries();
  double acc = 0.0;
  for (std::size_t i = 0; i < ee.size(); ++i) {
    acc += ee[i].real() * re[i].real() + ee[i].imag() * re[i].imag();
  }
  if (!std::isfinite(acc) || acc < -tol::kValidation ||
      acc > 1.0 + tol::kValidation) {
    throw NumericalError("expectation: Tr(E rho) outside [0, 1]");
  }
  return std::clamp(acc, 0.0, 1.0);
}

std::vector<double> simplex_project(std::span<const double> v) {
  if (v.empty()) throw ValidationError("simplex_project: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValidationError("simplex_project: non-finite entry");
    }
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  std::size_t active = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / double(j + 1);
    if (sorted[j] - candidate > 0.0) {
      theta = candidate;
      active = j + 1;
    }
  }
  (void)active;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
  }
  return out;
}

namespace detail {

HermitianMatrix assemble_from_spectrum(const CMatrix& vectors,
                                       std::span<const double> weights) {
  const std::size_t n = vectors.rows();
  std::vector<cplx> e(n * n);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double w = weights[k];
    if (w == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const cplx wv = w * vectors(r, k);
      for (std::size_t c = r; c < n; ++c) {
        e[r * n + c] += wv * std::conj(vectors(c, k));
      }
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    e[r * n + r] = e[r * n + r].real();
    for (std::size_t c = r + 1; c < n; ++c) {
      e[c * n + r] = std::conj(e[r * n + c]);
    }
  }
  return HermitianMatrix::from_entries_unchecked(n, std::move(e));
}

}  // namespace detail

DensityMatrix project_to_density(const HermitianMatrix& h) {
  const std::size_t n = h.dim();

  // Exactly diagonal input keeps its eigenbasis: project the diagonal
  // directly. This also keeps diagonal-structured optimization iterates
  // cheap at larger dims.
  bool diagonal = true;
  for (std::size_t r = 0; r < n && diagonal; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (r != c && h.at(r, c) != cplx{0.0, 0.0}) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = h.at(i, i).real();
    const std::vector<double> proj = simplex_project(d);
    std::vector<cplx> e(n * n);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = proj[i];
    return DensityMatrix(HermitianMatrix::from_entries_unchecked(n, std::move(e)));
  }

  const EigenDecomposition eig = hermitian_eig(h);
  const std::vector<double> proj = simplex_project(eig.values);
  return DensityMatrix(detail::assemble_from_spectrum(eig.vectors, proj));
}

HermitianMatrix psd_sqrt(const Effect& e) {
  const EigenDecomposition eig = hermitian_eig(e.matrix());
  std::vector<double> roots(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values[i];
    if (v < -tol::kValidation) {
      throw ValidationError("psd_sqrt: eigenvalue below -1e-9");
    }
    roots[i] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return detail::assemble_from_spectrum(eig.vectors, roots);
}

MeasurementBranch post_measurement_state(const DensityMatrix& rho,
                                         const Effect& e, int outcome) {
  if (e.dim() != rho.dim()) {
    throw ValidationError("post_measurement_state: dimension mismatch");
  }
  if (outcome != 0 && outcome != 1) {
    throw ValidationError("post_measurement_state: outcome must be 0 or 1");
  }
  const double p1 = expectation(e, rho);
  const double branch_prob = outcome == 1 ? p1 : 1.0 - p1;
  if (branch_prob <= tol::kDegenerateBranch) {
    throw DegenerateBranchError(
        "post_measurement_state: branch probability below 1e-12");
  }
  const HermitianMatrix s = outcome == 1 ? psd_sqrt(e) : psd_sqrt(e.complement());
  const CMatrix sm = s.to_cmatrix();
  CMatrix updated = sm * rho.matrix().to_cmatrix() * sm;
  const double tr = updated.trace().real();
  if (tr <= tol::kDegenerateBranch || !std::isfinite(tr)) {
    throw DegenerateBranchError(
        "post_measurement_state: branch state has vanishing trace");
  }
  updated *= 1.0 / tr;
  return MeasurementBranch{branch_prob, DensityMatrix(hermitian_part(updated))};
}

}  // namespace pgt
