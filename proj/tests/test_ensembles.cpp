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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "pgt/ensembles.hpp"
#include "pgt/qmatrix.hpp"

using namespace pgt;

namespace {

double purity(const DensityMatrix& rho) {
  const CMatrix m = rho.matrix().to_cmatrix();
  return (m * m).trace().real();
}

bool bit_identical(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    if (a.entries()[i] != b.entries()[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sample_pure_state: purity, determinism, Haar mean") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = sample_pure_state(3, rng);
    CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-10));
  }

  RngStream a(42, 7);
  RngStream b(42, 7);
  CHECK(bit_identical(sample_pure_state(2, a).matrix(),
                      sample_pure_state(2, b).matrix()));

  // Mean over many Haar samples approaches the maximally mixed state.
  RngStream mean_rng(32, 0);
  CMatrix mean(2, 2);
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    mean += sample_pure_state(1, mean_rng).matrix().to_cmatrix();
  }
  mean *= 1.0 / double(samples);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const cplx expected = r == c ? cplx{0.5, 0.0} : cplx{0.0, 0.0};
      CHECK(std::abs(mean(r, c) - expected) < 0.02);
    }
  }

  CHECK_THROWS_AS(sample_pure_state(0, rng), ValidationError);
  CHECK_THROWS_AS(sample_pure_state(11, rng), ValidationError);
}

TEST_CASE("sample_mixed_state: rank behavior") {
  RngStream rng(33, 0);
  const DensityMatrix rank1 = sample_mixed_state(2, 1, rng);
  CHECK(purity(rank1) == doctest::Approx(1.0).epsilon(1e-10));

  const DensityMatrix full = sample_mixed_state(2, 4, rng);
  CHECK(full.matrix().trace_real() == doctest::Approx(1.0).epsilon(1e-12));
  const EigenDecomposition eig = hermitian_eig(full.matrix());
  for (double v : eig.values) CHECK(v > 0.0);

  // Rank cap: a rank-2 draw on 3 qubits has at most 2 nonzero eigenvalues.
  const DensityMatrix rank2 = sample_mixed_state(3, 2, rng);
  const EigenDecomposition eig2 = hermitian_eig(rank2.matrix());
  for (std::size_t i = 0; i + 2 < eig2.values.size(); ++i) {
    CHECK(std::abs(eig2.values[i]) < 1e-12);
  }

  CHECK_THROWS_AS(sample_mixed_state(2, 0, rng), ValidationError);
  CHECK_THROWS_AS(sample_mixed_state(2, 5, rng), ValidationError);
}

TEST_CASE("sample_mixed_state: spectrum matches a resampled oracle") {
  // Mean sorted spectrum over two disjoint streams of full-rank draws.
  const int samples = 1000;
  std::vector<double> mean_a(4, 0.0), mean_b(4, 0.0);
  RngStream rng_a(34, 1);
  RngStream rng_b(34, 2);
  for (int i = 0; i < samples; ++i) {
    const EigenDecomposition ea =
        hermitian_eig(sample_mixed_state(2, 4, rng_a).matrix());
    const EigenDecomposition eb =
        hermitian_eig(sample_mixed_state(2, 4, rng_b).matrix());
    for (int j = 0; j < 4; ++j) {
      mean_a[j] += ea.values[j] / samples;
      mean_b[j] += eb.values[j] / samples;
    }
  }
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(mean_a[j] - mean_b[j]) < 0.02);
  }
}

TEST_CASE("sample_effect: pauli_local projector structure") {
  RngStream rng(35, 0);
  for (int n : {1, 2, 3}) {
    const MeasurementSource source = MeasurementSource::pauli_local(n);
    for (int trial = 0; trial < 5; ++trial) {
      const Effect e = sample_effect(source, rng);
      CHECK(e.matrix().trace_real() ==
            doctest::Approx(std::pow(2.0, n - 1)).epsilon(1e-12));
      // Eigenvalues in {0, 1} make E idempotent.
      const CMatrix m = e.matrix().to_cmatrix();
      CHECK((m * m - m).frobenius_norm() < 1e-12);
    }
  }
}

TEST_CASE("sample_effect: haar projector trace equals rank") {
  RngStream rng(36, 0);
  for (int rank : {1, 2, 3}) {
    const MeasurementSource source = MeasurementSource::haar_projector(2, rank);
    const Effect e = sample_effect(source, rng);
    CHECK(e.matrix().trace_real() == doctest::Approx(double(rank)).epsilon(1e-9));
    const CMatrix m = e.matrix().to_cmatrix();
    CHECK((m * m - m).frobenius_norm() < 1e-9);
  }
}

TEST_CASE("sample_effect: degenerate finite_list weights") {
  RngStream rng(37, 0);
  const Effect first = Effect(HermitianMatrix::from_entries(2, {1.0, 0.0, 0.0, 0.0}));
  const Effect second = Effect::identity(2);
  const MeasurementSource source =
      MeasurementSource::finite_list({first, second}, {1.0, 0.0});
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_effect(source, rng).shares_storage(first));
  }
}

TEST_CASE("sample_effect: every kind passes the effect invariants") {
  RngStream rng(38, 0);
  std::vector<MeasurementSource> sources;
  for (int n : {1, 2}) {
    sources.push_back(MeasurementSource::haar_projector(n, 1));
    sources.push_back(MeasurementSource::pauli_local(n));
    sources.push_back(MeasurementSource::spectral(n));
    sources.push_back(MeasurementSource::haar_projector(n, 1, 0.05));
    sources.push_back(MeasurementSource::spectral(n, 0.1));
  }
  const Effect e0 = Effect(HermitianMatrix::from_entries(2, {0.3, 0.0, 0.0, 0.9}));
  sources.push_back(MeasurementSource::finite_list({e0}, {1.0}, 0.2));
  for (const MeasurementSource& source : sources) {
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(check_effect_invariants(sample_effect(source, rng)));
    }
  }
}

TEST_CASE("sample_outcome: endpoints and binomial concentration") {
  RngStream rng(39, 0);
  const DensityMatrix rho = sample_pure_state(1, rng);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_outcome(Effect::identity(2), rho, rng) == 1);
    CHECK(sample_outcome(Effect::zero(2), rho, rng) == 0);
  }

  const Effect e = sample_effect(MeasurementSource::pauli_local(1), rng);
  const double p = expectation(e, rho);
  const int draws = 100000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += sample_outcome(e, rho, rng);
  const double se = std::sqrt(p * (1.0 - p) / draws);
  CHECK(std::abs(double(ones) / draws - p) <= 3.0 * se + 1e-12);
}

TEST_CASE("sample_outcome: empirical mean tracks Tr(E rho) across instances") {
  RngStream rng(40, 0);
  const MeasurementSource source = MeasurementSource::spectral(1);
  for (int inst = 0; inst < 20; ++inst) {
    const DensityMatrix rho = sample_mixed_state(1, 2, rng);
    const Effect e = sample_effect(source, rng);
    const double p = expectation(e, rho);
    const int draws = 100000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) ones += sample_outcome(e, rho, rng);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / draws);
    CHECK(std::abs(double(ones) / draws - p) <= 5.0 * se + 1e-9);
  }
}

TEST_CASE("estimate_probability: endpoints, grid, Hoeffding budget") {
  RngStream rng(41, 0);
  const std::vector<cplx> zero_amp{1.0, 0.0};
  const DensityMatrix rho = DensityMatrix::pure(zero_amp);
  CHECK(estimate_probability(Effect::identity(2), rho, 17, rng) == 1.0);

  const Effect e = sample_effect(MeasurementSource::pauli_local(1), rng);
  for (int trial = 0; trial < 20; ++trial) {
    const double est = estimate_probability(e, rho, 7, rng);
    const double scaled = est * 7.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
  }

  // copies = ceil(2 ln(2m/delta)/eta^2) with m = 20, delta = 0.01, eta = 0.1
  // keeps every estimate within eta/2 except with probability delta.
  const int copies = int(std::ceil(2.0 * std::log(2.0 * 20 / 0.01) / (0.1 * 0.1)));
  CHECK(copies == 1659);
  int good = 0;
  const int trials = 1000;
  const double p = expectation(e, rho);
  for (int t = 0; t < trials; ++t) {
    if (std::abs(estimate_probability(e, rho, copies, rng) - p) <= 0.05) ++good;
  }
  CHECK(good >= 990);

  CHECK_THROWS_AS(estimate_probability(e, rho, 0, rng), ValidationError);
}

TEST_CASE("reduce_k_outcome: uniform choice") {
  RngStream rng(42, 0);
  const Effect e = Effect(HermitianMatrix::from_entries(2, {0.25, 0.0, 0.0, 0.75}));
  const std::vector<Effect> pair{e, e.complement()};
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (reduce_k_outcome(pair, rng).first == 0) ++first;
  }
  CHECK(std::abs(double(first) / draws - 0.5) <= 0.02);

  const std::vector<Effect> sole{Effect::identity(2)};
  const auto [idx, chosen] = reduce_k_outcome(sole, rng);
  CHECK(idx == 0);
  CHECK(chosen.dim() == 2);
}

TEST_CASE("reduce_k_outcome: chi-square uniformity for the basis POVM") {
  RngStream rng(43, 0);
  std::vector<Effect> povm;
  for (std::size_t z = 0; z < 4; ++z) {
    std::vector<cplx> e(16);
    e[z * 4 + z] = 1.0;
    povm.emplace_back(HermitianMatrix::from_entries_unchecked(4, std::move(e)));
  }
  const int draws = 10000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) ++counts[reduce_k_outcome(povm, rng).first];
  double chi2 = 0.0;
  for (int c : counts) {
    const double diff = c - draws / 4.0;
    chi2 += diff * diff / (draws / 4.0);
  }
  CHECK(chi2 < 11.345);  // chi-square 0.99 quantile, 3 dof
}

TEST_CASE("reduce_k_outcome: rejects incomplete POVMs") {
  RngStream rng(44, 0);
  const Effect half = Effect(HermitianMatrix::from_entries(2, {0.5, 0.0, 0.0, 0.5}));
  const std::vector<Effect> bad{half, half, half};
  CHECK_THROWS_AS(reduce_k_outcome(bad, rng), ValidationError);
  CHECK_THROWS_AS(reduce_k_outcome(std::vector<Effect>{}, rng), ValidationError);
}

TEST_CASE("generated states pass density invariants") {
  RngStream rng(45, 0);
  for (int n : {1, 2, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      CHECK(check_density_invariants(sample_pure_state(n, rng)));
      CHECK(check_density_invariants(
          sample_mixed_state(n, 1 + int(rng.uniform_index(1 << n)), rng)));
    }
  }
}

TEST_CASE("rng: determinism and stream independence") {
  RngStream a(7, 3);
  RngStream b(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(7, 4);
  int agree = 0;
  RngStream a2(7, 3);
  for (int i = 0; i < 64; ++i) {
    if (a2.next_u64() == c.next_u64()) ++agree;
  }
  CHECK(agree == 0);

  // Substreams replay identically.
  RngStream parent(9, 1);
  RngStream s1 = parent.substream(5);
  RngStream s2 = parent.substream(5);
  for (int i = 0; i < 32; ++i) CHECK(s1.next_u64() == s2.next_u64());
}
