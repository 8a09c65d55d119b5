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

#include "pgt/protocols.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "pgt/qmatrix.hpp"

namespace pgt {

namespace {

void check_effect_dims(const DensityMatrix& rho, std::span<const Effect> effects) {
  for (const Effect& e : effects) {
    if (e.dim() != rho.dim()) {
      throw ValidationError("protocols: effect dimension mismatch");
    }
  }
}

/// Applies one step of rho <- sqrt(E) rho sqrt(E) without normalization.
CMatrix kraus_step(const CMatrix& sqrt_e, const CMatrix& state) {
  return sqrt_e * state * sqrt_e;
}

int sample_branch(double p1, RngStream& rng) {
  if (p1 <= tol::kDegenerateBranch) return 0;
  if (1.0 - p1 <= tol::kDegenerateBranch) return 1;
  return rng.uniform() < p1 ? 1 : 0;
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

double sequential_survival(const DensityMatrix& rho,
                           std::span<const Effect> effects) {
  check_effect_dims(rho, effects);
  CMatrix state = rho.matrix().to_cmatrix();
  for (const Effect& e : effects) {
    const CMatrix s = psd_sqrt(e).to_cmatrix();
    state = kraus_step(s, state);
  }
  return 1.0 - state.trace().real();
}

WitnessOutcome witness_protect_run(const DensityMatrix& rho0,
                                   const WitnessConfig& cfg, RngStream& rng) {
  if (cfg.effects.empty()) {
    throw ValidationError("witness_protect_run: no effects");
  }
  if (cfg.T < 1) throw ValidationError("witness_protect_run: T must be >= 1");
  check_effect_dims(rho0, cfg.effects);

  DensityMatrix held = rho0;
  const int t = 1 + int(rng.uniform_index(std::size_t(cfg.T)));
  for (int u = 1; u <= t; ++u) {
    const std::size_t i = rng.uniform_index(cfg.effects.size());
    const Effect& e = cfg.effects[i];
    const double p1 = expectation(e, held);
    if (sample_branch(p1, rng) == 0) {
      return WitnessOutcome{false, u, std::nullopt};
    }
    // Accepting with probability ~1 leaves the state defined; the degenerate
    // guard above already routed the p1 ~ 0 case to failure.
    held = post_measurement_state(held, e, 1).state;
  }
  return WitnessOutcome{true, 0, held};
}

WitnessStats witness_protect_stats(const DensityMatrix& rho0,
                                   const WitnessConfig& cfg, RngStream& rng) {
  if (cfg.effects.empty()) {
    throw ValidationError("witness_protect_stats: no effects");
  }
  if (cfg.T < 1) throw ValidationError("witness_protect_stats: T must be >= 1");
  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) {
    throw ValidationError("witness_protect_stats: lambda must be in (0, 1]");
  }
  check_effect_dims(rho0, cfg.effects);

  const std::size_t m = cfg.effects.size();
  const std::size_t dim = rho0.dim();

  WitnessStats stats;
  stats.epsilon = 0.0;
  for (const Effect& e : cfg.effects) {
    stats.epsilon = std::max(stats.epsilon, 1.0 - expectation(e, rho0));
  }
  stats.bound_success = 1.0 - double(cfg.T) * std::sqrt(stats.epsilon);
  stats.bound_conditional =
      1.0 - 2.0 * std::sqrt(double(m) / (cfg.lambda * double(cfg.T)));

  stats.exact = std::pow(double(m), double(cfg.T)) <= 1e6;
  CMatrix mixture(dim, dim);
  double success_mass = 0.0;

  if (stats.exact) {
    // The uniform choice at every step makes the path sum over length-t
    // prefixes equal to t applications of the averaged unnormalized channel
    // Phi(X) = (1/m) sum_i sqrt(E_i) X sqrt(E_i); summing over the uniformly
    // drawn t gives the exact success probability and conditional mixture.
    std::vector<CMatrix> roots;
    roots.reserve(m);
    for (const Effect& e : cfg.effects) roots.push_back(psd_sqrt(e).to_cmatrix());
    CMatrix state = rho0.matrix().to_cmatrix();
    for (int t = 1; t <= cfg.T; ++t) {
      CMatrix next(dim, dim);
      for (const CMatrix& s : roots) next += kraus_step(s, state);
      next *= 1.0 / double(m);
      state = next;
      mixture += state;
      success_mass += state.trace().real();
    }
    stats.success_prob = success_mass / double(cfg.T);
    mixture *= 1.0 / double(cfg.T);
  } else {
    if (cfg.trials < 1) {
      throw ValidationError("witness_protect_stats: trials must be >= 1");
    }
    int successes = 0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const WitnessOutcome out = witness_protect_run(rho0, cfg, rng);
      if (out.success) {
        ++successes;
        mixture += out.state->matrix().to_cmatrix();
      }
    }
    stats.success_prob = double(successes) / double(cfg.trials);
    success_mass = double(successes);
  }

  const double mass = mixture.trace().real();
  if (mass > 1e-12) {
    mixture *= 1.0 / mass;
    const DensityMatrix sigma(hermitian_part(mixture));
    double worst = 1.0;
    for (const Effect& e : cfg.effects) {
      worst = std::min(worst, expectation(e, sigma));
    }
    stats.conditional_min_expectation = worst;
  } else {
    stats.conditional_min_expectation = 0.0;
  }
  return stats;
}

VerifyResult verify_advice(const Effect& decision, const DensityMatrix& advice,
                           std::span<const AdviceTest> tests, int T,
                           RngStream& rng) {
  if (tests.empty()) throw ValidationError("verify_advice: no tests");
  if (T < 1) throw ValidationError("verify_advice: T must be >= 1");
  if (decision.dim() != advice.dim()) {
    throw ValidationError("verify_advice: register dimension mismatch");
  }
  for (const AdviceTest& t : tests) {
    if (t.effect.dim() != advice.dim()) {
      throw ValidationError("verify_advice: register dimension mismatch");
    }
    if (t.expected != 0 && t.expected != 1) {
      throw ValidationError("verify_advice: expected bit must be 0 or 1");
    }
  }

  DensityMatrix held = advice;
  const int t = 1 + int(rng.uniform_index(std::size_t(T)));
  for (int u = 1; u <= t; ++u) {
    const AdviceTest& test = tests[rng.uniform_index(tests.size())];
    const double p1 = expectation(test.effect, held);
    const int outcome = sample_branch(p1, rng);
    if (outcome != test.expected) return VerifyResult::dont_know;
    held = post_measurement_state(held, test.effect, outcome).state;
  }
  const double p_accept = expectation(decision, held);
  return sample_branch(p_accept, rng) == 1 ? VerifyResult::accept
                                           : VerifyResult::reject;
}

std::uint32_t WeightedSupport::sample(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += weights[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

CommProblem::CommProblem(int x_bits, int y_bits, std::size_t dim,
                         StateFn states, EffectFn effects, TruthFn truth,
                         OverlapFn exact_overlap, WeightedSupport y_distribution,
                         double eta_protocol)
    : x_bits_(x_bits),
      y_bits_(y_bits),
      dim_(dim),
      states_(std::move(states)),
      effects_(std::move(effects)),
      truth_(std::move(truth)),
      overlap_(std::move(exact_overlap)),
      y_distribution_(std::move(y_distribution)),
      eta_protocol_(eta_protocol) {
  set_y_distribution(y_distribution_);
}

void CommProblem::set_y_distribution(WeightedSupport dist) {
  if (dist.values.empty() || dist.values.size() != dist.weights.size()) {
    throw ValidationError("CommProblem: malformed y distribution");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    if (dist.values[i] >= (std::uint32_t{1} << y_bits_)) {
      throw ValidationError("CommProblem: y value outside domain");
    }
    if (dist.weights[i] < 0.0) {
      throw ValidationError("CommProblem: negative weight");
    }
    sum += dist.weights[i];
  }
  if (std::abs(sum - 1.0) > tol::kWeightSum) {
    throw ValidationError("CommProblem: weights must sum to 1");
  }
  y_distribution_ = std::move(dist);
}

namespace {

struct LinearCode {
  int length = 0;
  std::size_t chunks = 0;
  std::vector<std::uint64_t> generators;  // input_bits rows, chunked

  std::vector<std::uint64_t> codeword(std::uint32_t x) const {
    std::vector<std::uint64_t> w(chunks, 0);
    for (int bit = 0; x != 0; ++bit, x >>= 1) {
      if (x & 1u) {
        for (std::size_t c = 0; c < chunks; ++c) {
          w[c] ^= generators[std::size_t(bit) * chunks + c];
        }
      }
    }
    return w;
  }
};

int hamming_distance(const std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b) {
  int d = 0;
  for (std::size_t c = 0; c < a.size(); ++c) d += std::popcount(a[c] ^ b[c]);
  return d;
}

}  // namespace

CommProblem make_fingerprint_protocol(int input_bits, int codeword_length,
                                      std::uint64_t seed) {
  if (input_bits < 2 || input_bits > 12) {
    throw ValidationError("make_fingerprint_protocol: input_bits must be in [2, 12]");
  }
  if (codeword_length < 16 || (codeword_length & (codeword_length - 1)) != 0) {
    throw ValidationError(
        "make_fingerprint_protocol: codeword_length must be a power of 2, >= 16");
  }

  const int L = codeword_length;
  const std::size_t chunks = std::size_t((L + 63) / 64);
  const std::uint32_t domain = std::uint32_t{1} << input_bits;
  const int lo = int(std::ceil(0.3 * L));
  const int hi = int(std::floor(0.7 * L));

  // Random linear code: distances are codeword weights, which concentrate
  // hard enough around L/2 for the [0.3, 0.7] window to be reachable.
  LinearCode code;
  code.length = L;
  code.chunks = chunks;
  bool found = false;
  double eta = 0.0;
  for (std::uint64_t attempt = 0; attempt < 20 && !found; ++attempt) {
    RngStream rng(seed, attempt);
    code.generators.assign(std::size_t(input_bits) * chunks, 0);
    for (std::uint64_t& word : code.generators) word = rng.next_u64();
    if (L % 64 != 0) {
      const std::uint64_t mask = (std::uint64_t{1} << (L % 64)) - 1;
      for (std::size_t row = 0; row < std::size_t(input_bits); ++row) {
        code.generators[row * chunks + chunks - 1] &= mask;
      }
    }
    // Linearity makes pairwise distances the weights of nonzero codewords,
    // but scan all pairs anyway: the check is the contract.
    std::vector<std::vector<std::uint64_t>> words(domain);
    for (std::uint32_t x = 0; x < domain; ++x) words[x] = code.codeword(x);
    bool ok = true;
    double worst = 0.0;
    for (std::uint32_t x = 0; x < domain && ok; ++x) {
      for (std::uint32_t y = x + 1; y < domain; ++y) {
        const int d = hamming_distance(words[x], words[y]);
        if (d < lo || d > hi) {
          ok = false;
          break;
        }
        const double overlap = (double(L) - 2.0 * d) / double(L);
        worst = std::max(worst, overlap * overlap);
      }
    }
    if (ok) {
      found = true;
      eta = worst;
    }
  }
  if (!found) {
    throw ValidationError(
        "make_fingerprint_protocol: distance target unreachable after 20 seeds; "
        "increase codeword_length");
  }

  auto shared_code = std::make_shared<const LinearCode>(code);
  const std::size_t dim = std::size_t(L);

  auto amplitudes = [shared_code, dim](std::uint32_t x) {
    const std::vector<std::uint64_t> w = shared_code->codeword(x);
    const double scale = 1.0 / std::sqrt(double(dim));
    std::vector<cplx> amp(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const bool bit = (w[j / 64] >> (j % 64)) & 1u;
      amp[j] = bit ? -scale : scale;
    }
    return amp;
  };
  auto outer = [](const std::vector<cplx>& amp) {
    const std::size_t n = amp.size();
    std::vector<cplx> e(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        e[r * n + c] = amp[r] * std::conj(amp[c]);
      }
    }
    return HermitianMatrix::from_entries_unchecked(n, std::move(e));
  };

  CommProblem::StateFn states = [amplitudes, outer](std::uint32_t x) {
    return DensityMatrix(outer(amplitudes(x)));
  };
  CommProblem::EffectFn effects = [amplitudes, outer](std::uint32_t y) {
    return Effect(outer(amplitudes(y)));
  };
  CommProblem::TruthFn truth = [](std::uint32_t x, std::uint32_t y) {
    return x == y;
  };
  CommProblem::OverlapFn overlap = [shared_code, L](std::uint32_t x,
                                                    std::uint32_t y) {
    const int d = hamming_distance(shared_code->codeword(x),
                                   shared_code->codeword(y));
    const double ip = (double(L) - 2.0 * d) / double(L);
    return ip * ip;
  };

  WeightedSupport uniform;
  uniform.values.resize(domain);
  uniform.weights.assign(domain, 1.0 / double(domain));
  for (std::uint32_t y = 0; y < domain; ++y) uniform.values[y] = y;

  // Protocol-error invariant, re-verified exhaustively: overlap is 1 exactly
  // when x == y, and at most eta otherwise.
  for (std::uint32_t x = 0; x < domain; ++x) {
    for (std::uint32_t y = 0; y < domain; ++y) {
      const double v = overlap(x, y);
      if (x == y ? v < 1.0 - 1e-12 : v > eta + 1e-12) {
        throw NumericalError("make_fingerprint_protocol: eta invariant violated");
      }
    }
  }

  return CommProblem(input_bits, input_bits, dim, std::move(states),
                     std::move(effects), std::move(truth), std::move(overlap),
                     std::move(uniform), eta);
}

OneWayResult simulate_one_way(const CommProblem& problem, std::uint32_t x,
                              int k, RngStream& rng,
                              const OneWayOptions& options) {
  if (k < 0) throw ValidationError("simulate_one_way: k must be >= 0");
  if (x >= (std::uint32_t{1} << problem.x_bits())) {
    throw ValidationError("simulate_one_way: x outside domain");
  }
  if (options.n_test < 1) {
    throw ValidationError("simulate_one_way: n_test must be >= 1");
  }

  // Alice's message: k samples (y_i, f(x, y_i)). Bob sees only those.
  std::map<std::uint32_t, Effect> effect_cache;
  auto effect_for = [&](std::uint32_t y) -> const Effect& {
    auto it = effect_cache.find(y);
    if (it == effect_cache.end()) {
      it = effect_cache.emplace(y, problem.bob_effect(y)).first;
    }
    return it->second;
  };

  std::vector<Effect> effects;
  std::vector<double> labels;
  effects.reserve(std::size_t(k));
  labels.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) {
    const std::uint32_t y = problem.y_distribution().sample(rng);
    effects.push_back(effect_for(y));
    labels.push_back(problem.truth(x, y) ? 1.0 : 0.0);
  }

  LearnerConfig config = options.learner;
  config.eta = options.eta;
  const TrainingSet train =
      effects.empty()
          ? TrainingSet::empty(problem.dim(), TrainingSet::LabelKind::probability)
          : TrainingSet::probabilities(std::move(effects), std::move(labels));
  const LearnedHypothesis hypothesis = learn_feasible(train, config);

  int errors = 0;
  for (int i = 0; i < options.n_test; ++i) {
    const std::uint32_t y = problem.y_distribution().sample(rng);
    const bool guess =
        expectation(effect_for(y), hypothesis.sigma) >= 0.5;
    if (guess != problem.truth(x, y)) ++errors;
  }
  return OneWayResult{double(errors) / double(options.n_test), k};
}

}  // namespace pgt
