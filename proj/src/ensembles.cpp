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

#include "pgt/ensembles.hpp"

#include <cmath>

#include "pgt/qmatrix.hpp"

namespace pgt {

namespace {

constexpr int kMaxQubits = 10;

std::size_t dim_for_qubits(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("n_qubits must be in [1, 10]");
  }
  return std::size_t{1} << n_qubits;
}

std::vector<cplx> gaussian_vector(std::size_t n, RngStream& rng) {
  std::vector<cplx> v(n);
  for (cplx& z : v) z = rng.gaussian_complex();
  return v;
}

// Orthonormalizes the columns of a dim x cols Gaussian draw. Modified
// Gram-Schmidt with one re-orthogonalization pass.
CMatrix haar_orthonormal_columns(std::size_t dim, std::size_t cols,
                                 RngStream& rng) {
  CMatrix q(dim, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<cplx> col = gaussian_vector(dim, rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        cplx overlap = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
          overlap += std::conj(q(r, prev)) * col[r];
        }
        for (std::size_t r = 0; r < dim; ++r) col[r] -= overlap * q(r, prev);
      }
    }
    double norm2 = 0.0;
    for (const cplx& z : col) norm2 += std::norm(z);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t r = 0; r < dim; ++r) q(r, c) = col[r] * inv;
  }
  return q;
}

// 2x2 Pauli factors.
CMatrix pauli_factor(int code) {
  CMatrix m(2, 2);
  switch (code) {
    case 0:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:
      m(0, 1) = cplx{0.0, -1.0};
      m(1, 0) = cplx{0.0, 1.0};
      break;
    default:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Effect clamp_spectrum(const HermitianMatrix& h) {
  const EigenDecomposition eig = hermitian_eig(h);
  std::vector<double> clamped(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    clamped[i] = std::clamp(eig.values[i], 0.0, 1.0);
  }
  return Effect(detail::assemble_from_spectrum(eig.vectors, clamped));
}

Effect perturb(const Effect& e, double scale, RngStream& rng) {
  const std::size_t n = e.dim();
  std::vector<cplx> g(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    g[r * n + r] = scale * rng.gaussian();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx z = scale * rng.gaussian_complex();
      g[r * n + c] = z;
      g[c * n + r] = std::conj(z);
    }
  }
  return clamp_spectrum(e.matrix() +
                        HermitianMatrix::from_entries_unchecked(n, std::move(g)));
}

Effect sample_effect_raw(const MeasurementSource& source, RngStream& rng) {
  switch (source.kind) {
    case MeasurementSource::Kind::haar_projector: {
      const std::size_t dim = dim_for_qubits(source.n_qubits);
      const CMatrix q = haar_orthonormal_columns(dim, source.rank, rng);
      std::vector<double> ones(source.rank, 1.0);
      return Effect(detail::assemble_from_spectrum(q, ones));
    }
    case MeasurementSource::Kind::pauli_local: {
      const std::size_t count = (std::size_t{1} << (2 * source.n_qubits)) - 1;
      // Codes 1 .. 4^n - 1; the all-identity string is excluded so sampled
      // effects are never trivial.
      const std::size_t code = 1 + rng.uniform_index(count);
      CMatrix p(1, 1);
      p(0, 0) = 1.0;
      std::size_t rest = code;
      for (int qubit = 0; qubit < source.n_qubits; ++qubit) {
        p = kron(p, pauli_factor(int(rest % 4)));
        rest /= 4;
      }
      const std::size_t dim = p.rows();
      std::vector<cplx> e(dim * dim);
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
          e[r * dim + c] = 0.5 * p(r, c);
        }
        e[r * dim + r] += 0.5;
      }
      return Effect(HermitianMatrix::from_entries_unchecked(dim, std::move(e)));
    }
    case MeasurementSource::Kind::spectral: {
      const std::size_t dim = dim_for_qubits(source.n_qubits);
      const CMatrix u = haar_orthonormal_columns(dim, dim, rng);
      std::vector<double> spectrum(dim);
      for (double& x : spectrum) x = rng.uniform();
      return Effect(detail::assemble_from_spectrum(u, spectrum));
    }
    case MeasurementSource::Kind::finite_list: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t i = 0; i < source.effects.size(); ++i) {
        acc += source.weights[i];
        if (u < acc) return source.effects[i];
      }
      return source.effects.back();
    }
  }
  throw ValidationError("sample_effect: unknown source kind");
}

}  // namespace

MeasurementSource MeasurementSource::haar_projector(int n_qubits, int rank,
                                                    double noise_scale) {
  const std::size_t dim = dim_for_qubits(n_qubits);
  if (rank < 1 || std::size_t(rank) > dim) {
    throw ValidationError("haar_projector: rank must be in [1, 2^n]");
  }
  MeasurementSource s;
  s.kind = Kind::haar_projector;
  s.n_qubits = n_qubits;
  s.rank = rank;
  s.noise_scale = noise_scale;
  return s;
}

MeasurementSource MeasurementSource::pauli_local(int n_qubits,
                                                 double noise_scale) {
  dim_for_qubits(n_qubits);
  MeasurementSource s;
  s.kind = Kind::pauli_local;
  s.n_qubits = n_qubits;
  s.noise_scale = noise_scale;
  return s;
}

MeasurementSource MeasurementSource::spectral(int n_qubits, double noise_scale) {
  dim_for_qubits(n_qubits);
  MeasurementSource s;
  s.kind = Kind::spectral;
  s.n_qubits = n_qubits;
  s.noise_scale = noise_scale;
  return s;
}

MeasurementSource MeasurementSource::finite_list(std::vector<Effect> effects,
                                                 std::vector<double> weights,
                                                 double noise_scale) {
  if (effects.empty() || effects.size() != weights.size()) {
    throw ValidationError("finite_list: effects and weights must align");
  }
  const std::size_t dim = effects.front().dim();
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("finite_list: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol::kWeightSum) {
    throw ValidationError("finite_list: weights must sum to 1");
  }
  for (const Effect& e : effects) {
    if (e.dim() != dim) throw ValidationError("finite_list: mixed dimensions");
  }
  MeasurementSource s;
  s.kind = Kind::finite_list;
  s.n_qubits = 0;
  while ((std::size_t{1} << s.n_qubits) < dim) ++s.n_qubits;
  s.noise_scale = noise_scale;
  s.effects = std::move(effects);
  s.weights = std::move(weights);
  return s;
}

std::size_t MeasurementSource::dim() const {
  if (kind == Kind::finite_list) return effects.front().dim();
  return std::size_t{1} << n_qubits;
}

DensityMatrix sample_pure_state(int n_qubits, RngStream& rng) {
  const std::size_t dim = dim_for_qubits(n_qubits);
  const std::vector<cplx> amps = gaussian_vector(dim, rng);
  return DensityMatrix::pure(amps);
}

DensityMatrix sample_mixed_state(int n_qubits, int rank, RngStream& rng) {
  const std::size_t dim = dim_for_qubits(n_qubits);
  if (rank < 1 || std::size_t(rank) > dim) {
    throw ValidationError("sample_mixed_state: rank must be in [1, 2^n]");
  }
  CMatrix a(dim, rank);
  for (std::size_t r = 0; r < dim; ++r) {
    for (int c = 0; c < rank; ++c) a(r, c) = rng.gaussian_complex();
  }
  std::vector<double> ones(rank, 1.0);
  HermitianMatrix gram = detail::assemble_from_spectrum(a, ones);
  return DensityMatrix(gram.scaled(1.0 / gram.trace_real()));
}

Effect sample_effect(const MeasurementSource& source, RngStream& rng) {
  Effect e = sample_effect_raw(source, rng);
  if (source.noise_scale > 0.0) e = perturb(e, source.noise_scale, rng);
  return e;
}

int sample_outcome(const Effect& e, const DensityMatrix& rho, RngStream& rng) {
  const double p = expectation(e, rho);
  return rng.uniform() < p ? 1 : 0;
}

double estimate_probability(const Effect& e, const DensityMatrix& rho,
                            int copies, RngStream& rng) {
  if (copies < 1) throw ValidationError("estimate_probability: copies must be >= 1");
  const double p = expectation(e, rho);
  int ones = 0;
  for (int i = 0; i < copies; ++i) {
    if (rng.uniform() < p) ++ones;
  }
  return double(ones) / double(copies);
}

std::pair<std::size_t, Effect> reduce_k_outcome(std::span<const Effect> povm,
                                                RngStream& rng) {
  if (povm.empty()) throw ValidationError("reduce_k_outcome: empty POVM");
  const std::size_t dim = povm.front().dim();
  std::vector<cplx> sum(dim * dim);
  for (const Effect& e : povm) {
    if (e.dim() != dim) throw ValidationError("reduce_k_outcome: mixed dims");
    std::span<const cplx> entries = e.matrix().entries();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += entries[i];
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const cplx expect = r == c ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      if (std::abs(sum[r * dim + c] - expect) > tol::kPovmCompleteness) {
        throw ValidationError(
            "reduce_k_outcome: POVM elements do not sum to identity");
      }
    }
  }
  const std::size_t j = rng.uniform_index(povm.size());
  return {j, povm[j]};
}

}  // namespace pgt
