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
//
// End-to-end acceptance suite. One pass/fail line per criterion; exit code is
// the number of failed criteria. Every tolerance and threshold is pinned
// here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle_helpers.hpp"
#include "pgt/bounds.hpp"
#include "pgt/harness.hpp"
#include "pgt/harness_io.hpp"
#include "pgt/learner.hpp"
#include "pgt/protocols.hpp"
#include "pgt/qmatrix.hpp"

using namespace pgt;

namespace {

struct Checker {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      failures.push_back(what + " (got " + std::to_string(got) + ", want " +
                         std::to_string(want) + " +- " + std::to_string(tol) + ")");
    }
  }
  void require_le(double got, double bound, const std::string& what) {
    if (!(got <= bound)) {
      failures.push_back(what + " (got " + std::to_string(got) + " > " +
                         std::to_string(bound) + ")");
    }
  }
  void require_ge(double got, double bound, const std::string& what) {
    if (!(got >= bound)) {
      failures.push_back(what + " (got " + std::to_string(got) + " < " +
                         std::to_string(bound) + ")");
    }
  }
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ExperimentSpec base_spec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.labels.mode = LabelSpec::Mode::exact;
  return spec;
}

// --------------------------------------------------------------------------
// 1. Validity fuzz: 100 randomized learner runs across all three rules.

void criterion_1(Checker& check) {
  RngStream rng(1001, 0);
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + (i / 3) % 3;
    const int m = 15 + (i * 7) % 26;
    const DensityMatrix rho =
        sample_mixed_state(n, 1 + int(rng.uniform_index(std::size_t{1} << n)), rng);
    const MeasurementSource source = MeasurementSource::spectral(n);
    std::vector<Effect> effects;
    std::vector<double> probs;
    std::vector<std::uint8_t> bits;
    for (int j = 0; j < m; ++j) {
      effects.push_back(sample_effect(source, rng));
      probs.push_back(expectation(effects.back(), rho));
      bits.push_back(std::uint8_t(sample_outcome(effects.back(), rho, rng)));
    }
    LearnerConfig config;
    config.eta = 0.05;
    LearnedHypothesis hyp = [&] {
      switch (i % 3) {
        case 0:
          return learn_feasible(TrainingSet::probabilities(effects, probs), config);
        case 1:
          return learn_quadratic(TrainingSet::bits(effects, bits), config);
        default:
          return learn_absolute(TrainingSet::bits(effects, bits), config);
      }
    }();
    check.require(check_density_invariants(hyp.sigma, 1e-8),
                  "run " + std::to_string(i) + ": hypothesis invariants at 1e-8");
  }
}

// --------------------------------------------------------------------------
// 2. Exact-label feasibility: n=2, m=100, eta=0.05, 50/50 seeds converge.

void criterion_2(Checker& check) {
  const MeasurementSource source = MeasurementSource::haar_projector(2, 1);
  int converged = 0;
  for (int seed = 0; seed < 50; ++seed) {
    RngStream rng(2000 + seed, 0);
    const DensityMatrix rho = sample_mixed_state(2, 2, rng);
    std::vector<Effect> effects;
    std::vector<double> labels;
    for (int i = 0; i < 100; ++i) {
      effects.push_back(sample_effect(source, rng));
      labels.push_back(expectation(effects.back(), rho));
    }
    LearnerConfig config;
    config.eta = 0.05;
    const LearnedHypothesis hyp =
        learn_feasible(TrainingSet::probabilities(effects, labels), config);
    if (hyp.converged && hyp.max_residual <= 0.05) ++converged;
  }
  check.require(converged == 50, "feasibility: " + std::to_string(converged) +
                                     "/50 converged with residual <= eta");
}

// --------------------------------------------------------------------------
// 3. Generalization trend: n=2, Haar rank-1, gamma=0.1, m in {25,100,400}.

void criterion_3(Checker& check) {
  ExperimentSpec spec = base_spec(ExperimentKind::generalization_sweep);
  spec.n_qubits = 2;
  spec.state.type = StateSpec::Type::pure;
  spec.source = MeasurementSource::haar_projector(2, 1);
  spec.m_values = {25, 100, 400};
  spec.gamma = 0.1;
  spec.eta = 0.05;
  spec.learner.eta = 0.05;
  spec.n_test = 500;
  spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Report report = run_generalization_sweep(spec);
  for (const ReportRow& row : report.rows) {
    check.require(!row.failed, "row failed: " + row.error);
  }
  const double m25 = report.aggregates[0].median_test_error;
  const double m100 = report.aggregates[1].median_test_error;
  const double m400 = report.aggregates[2].median_test_error;
  check.require(m100 <= m25 && m400 <= m100,
                "median test error non-increasing in m (" + std::to_string(m25) +
                    ", " + std::to_string(m100) + ", " + std::to_string(m400) + ")");
  check.require_le(m400, 0.15, "median test error at m=400");
}

// --------------------------------------------------------------------------
// 4. Measure-once learner: n=1, Pauli source, m=2000 single-shot bits.

void criterion_4(Checker& check) {
  ExperimentSpec spec = base_spec(ExperimentKind::measure_once_sweep);
  spec.n_qubits = 1;
  spec.state.type = StateSpec::Type::pure;
  spec.source = MeasurementSource::pauli_local(1);
  spec.m_values = {2000};
  spec.gamma = 0.15;
  spec.n_test = 500;
  spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Report report = run_measure_once_sweep(spec);
  for (const ReportRow& row : report.rows) {
    check.require(!row.failed, "row failed: " + row.error);
  }
  check.require_le(report.aggregates[0].median_test_error, 0.2,
                   "median test error at m=2000");
}

// --------------------------------------------------------------------------
// 5. Quantum union bound: exact survival vs m sqrt(eps), plus Monte Carlo.

void criterion_5(Checker& check) {
  RngStream rng(5001, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + int(rng.uniform_index(5));
    const double eps = 0.01 + 0.3 * rng.uniform();
    const oracle::SurvivalInstance inst =
        oracle::random_survival_instance(4, m, eps, rng);
    const double failure = sequential_survival(inst.rho, inst.effects);
    check.require_le(failure, double(m) * std::sqrt(inst.epsilon) + 1e-9,
                     "union bound instance " + std::to_string(trial));
  }
  // Monte Carlo agreement on 10 instances.
  for (int inst_id = 0; inst_id < 10; ++inst_id) {
    const oracle::SurvivalInstance inst =
        oracle::random_survival_instance(2, 1 + inst_id % 5, 0.2, rng);
    const double exact = sequential_survival(inst.rho, inst.effects);
    std::vector<CMatrix> roots;
    for (const Effect& e : inst.effects) roots.push_back(psd_sqrt(e).to_cmatrix());
    const int runs = 100000;
    int failures = 0;
    for (int r = 0; r < runs; ++r) {
      CMatrix state = inst.rho.matrix().to_cmatrix();
      double norm = 1.0;
      for (const CMatrix& s : roots) {
        const CMatrix next = s * state * s;
        const double p = next.trace().real() / norm;
        if (rng.uniform() >= p) {
          ++failures;
          break;
        }
        state = next;
        norm *= p;
      }
    }
    const double mc = double(failures) / runs;
    const double sigma = std::sqrt(std::max(exact * (1 - exact), 1e-9) / runs);
    check.require_near(mc, exact, 3.0 * sigma + 1e-6,
                       "union bound Monte Carlo " + std::to_string(inst_id));
  }
}

// --------------------------------------------------------------------------
// 6. Witness procedure: exact fixtures at T=12, m=3; Monte Carlo at T=100.

void criterion_6(Checker& check) {
  RngStream rng(6001, 0);
  for (int fixture = 0; fixture < 3; ++fixture) {
    const std::size_t dim = fixture == 2 ? 4 : 2;
    const double eps = fixture == 0 ? 1e-3 : (fixture == 1 ? 1e-4 : 5e-3);
    const oracle::SurvivalInstance inst =
        oracle::random_survival_instance(dim, 3, eps, rng);
    WitnessConfig cfg;
    cfg.effects = inst.effects;
    cfg.T = 12;
    cfg.lambda = 1.0 / 3.0;
    RngStream stat_rng(6002, std::uint64_t(fixture));
    const WitnessStats stats = witness_protect_stats(inst.rho, cfg, stat_rng);
    check.require(stats.exact, "fixture uses exact enumeration");
    check.require_ge(stats.success_prob, stats.bound_success - 1e-12,
                     "success >= 1 - T sqrt(eps) on fixture " +
                         std::to_string(fixture));
    if (stats.success_prob >= cfg.lambda) {
      check.require_ge(stats.conditional_min_expectation,
                       stats.bound_conditional - 1e-12,
                       "conditional expectation bound on fixture " +
                           std::to_string(fixture));
    }
  }

  // Monte Carlo: honest state, per-test acceptance 1 - 1e-4, T = 100.
  WitnessConfig cfg;
  std::vector<cplx> e1(4), e2(4);
  e1[0] = 1.0 - 1e-4;
  e1[3] = 0.3;
  e2[0] = 1.0 - 2e-5;
  e2[3] = 0.6;
  cfg.effects = {Effect(HermitianMatrix::from_entries_unchecked(2, e1)),
                 Effect(HermitianMatrix::from_entries_unchecked(2, e2))};
  cfg.T = 100;
  cfg.lambda = 1.0 / 3.0;
  cfg.trials = 10000;
  RngStream mc_rng(6003, 0);
  const DensityMatrix rho0 = DensityMatrix::pure(std::vector<cplx>{1.0, 0.0});
  const WitnessStats stats = witness_protect_stats(rho0, cfg, mc_rng);
  check.require(!stats.exact, "T=100 instance uses Monte Carlo");
  check.require_near(stats.epsilon, 1e-4, 1e-12, "instance epsilon");
  const double sigma = std::sqrt(0.995 * 0.005 / cfg.trials);
  check.require_ge(stats.success_prob, 0.99 - 3.0 * sigma,
                   "Monte Carlo success rate");
}

// --------------------------------------------------------------------------
// 7. One-way simulation: fingerprint equality at N=8, L=64, k=60.

void criterion_7(Checker& check) {
  CommProblem problem = make_fingerprint_protocol(8, 64, 5);
  check.require_le(problem.eta_protocol(), 0.16,
                   "quantum baseline eta from code distance");

  const std::uint32_t x = 77;
  RngStream pick(7001, 0);
  WeightedSupport support;
  support.values.push_back(x);
  while (support.values.size() < 16) {
    const std::uint32_t y = std::uint32_t(pick.uniform_index(256));
    bool seen = false;
    for (std::uint32_t v : support.values) seen = seen || v == y;
    if (!seen) support.values.push_back(y);
  }
  support.weights.assign(16, 1.0 / 16.0);
  problem.set_y_distribution(support);

  OneWayOptions options;
  options.n_test = 300;
  int good = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    RngStream rng(std::uint64_t(seed), 0);
    const OneWayResult res = simulate_one_way(problem, x, 60, rng, options);
    if (res.test_error_rate <= 1.0 / 3.0) ++good;
  }
  check.require(good >= 9, "test error <= 1/3 in " + std::to_string(good) +
                               "/10 seeds (need >= 9)");
}

// --------------------------------------------------------------------------
// 8. Bounds: two-implementation oracle, named preconditions, pinned value.

void criterion_8(Checker& check) {
  RngStream rng(8001, 0);
  for (int point = 0; point < 100; ++point) {
    BoundQuery q;
    q.n_qubits = 1 + int(rng.uniform_index(24));
    q.gamma = 0.25 + 0.6 * rng.uniform();
    q.epsilon = 0.25 + 0.6 * rng.uniform();
    q.eta = 0.0;
    q.delta = 0.01 + 0.5 * rng.uniform();
    q.K = 0.5 + 2.0 * rng.uniform();
    q.alpha = 0.1 + 0.9 * rng.uniform();
    oracle::BoundInputs in;
    in.n = q.n_qubits;
    in.gamma = q.gamma;
    in.epsilon = q.epsilon;
    in.eta = q.eta;
    in.delta = q.delta;
    in.K = q.K;
    in.alpha = q.alpha;
    const std::string tag = " at point " + std::to_string(point);
    check.require(m_upper_probability(q).m == oracle::bound_upper_probability(in),
                  "upper_probability" + tag);
    check.require(m_upper_probability_refined(q).m ==
                      oracle::bound_upper_probability_refined(in),
                  "upper_probability_refined" + tag);
    check.require(m_upper_measure_once(q).m == oracle::bound_upper_measure_once(in),
                  "upper_measure_once" + tag);
    check.require(m_upper_prediction(q).m == oracle::bound_upper_prediction(in),
                  "upper_prediction" + tag);
    BoundQuery lower = q;
    lower.model = BoundModel::probability_labels;
    check.require(m_lower(lower).m == oracle::bound_lower(in, false),
                  "lower_probability" + tag);
    lower.model = BoundModel::measure_once;
    check.require(m_lower(lower).m == oracle::bound_lower(in, true),
                  "lower_measure_once" + tag);
    const double gamma_cap = 0.02 + 0.45 * ((q.gamma - 0.25) / 0.6);
    check.require(fat_dim_upper(q.n_qubits, gamma_cap) ==
                      oracle::bound_fat_dim(q.n_qubits, gamma_cap),
                  "fat_dim_upper" + tag);
    check.require(std::abs(binary_entropy(q.epsilon) -
                           double(oracle::bound_entropy(q.epsilon))) < 1e-14,
                  "binary_entropy" + tag);
  }

  bool named_ge = false;
  try {
    BoundQuery q;
    q.gamma = 0.1;
    q.epsilon = 0.1;
    q.eta = 0.01;
    q.delta = 0.1;
    m_upper_probability(q);
  } catch (const ValidationError& e) {
    named_ge = std::string(e.what()).find("gamma*epsilon >= 7*eta") !=
               std::string::npos;
  }
  check.require(named_ge, "precondition error names gamma*epsilon >= 7*eta");

  bool named_gt = false;
  try {
    BoundQuery q;
    q.gamma = 0.1;
    q.epsilon = 0.1;
    q.eta = 0.1;
    q.delta = 0.1;
    m_upper_probability_refined(q);
  } catch (const ValidationError& e) {
    named_gt = std::string(e.what()).find("gamma > eta") != std::string::npos;
  }
  check.require(named_gt, "precondition error names gamma > eta");

  check.require(fat_dim_upper(10, 0.1) == 346, "fat_dim_upper(10, 0.1) == 346");
}

// --------------------------------------------------------------------------
// 9. Lower-bound experiment: failure rate >= 0.25 at m=5, <= 0.05 at m=2000.

void criterion_9(Checker& check) {
  ExperimentSpec spec = base_spec(ExperimentKind::lower_bound);
  spec.n_qubits = 8;
  spec.state.type = StateSpec::Type::hard_instance;
  spec.state.k = 8;
  spec.state.gamma = 0.45;
  spec.gamma = 0.45;
  spec.epsilon = 0.1;
  spec.eta = 0.01;
  spec.learner.eta = 0.01;
  spec.n_test = 1;
  spec.m_values = {5, 2000};
  spec.seeds.resize(200);
  for (std::size_t i = 0; i < 200; ++i) spec.seeds[i] = 9000 + i;
  const Report report = run_lower_bound_experiment(spec);
  for (const ReportRow& row : report.rows) {
    check.require(!row.failed, "row failed: " + row.error);
  }
  check.require_ge(report.aggregates[0].failure_rate, 0.25,
                   "failure rate at m=5");
  check.require_le(report.aggregates[1].failure_rate, 0.05,
                   "failure rate at m=2000");
}

// --------------------------------------------------------------------------
// 10. Projection oracles on 50 random low-dimensional cases.

void criterion_10(Checker& check) {
  RngStream rng(10001, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const HermitianMatrix h = oracle::random_hermitian(2, rng);
    const DensityMatrix proj = project_to_density(h);
    const double proj_dist = (proj.matrix() - h).frobenius_norm();
    const double grid_dist = oracle::bloch_grid_min_distance(h, 0.02, 3);
    check.require(proj_dist <= grid_dist + 1e-9,
                  "projection no worse than grid, case " + std::to_string(trial));
    check.require_near(proj_dist, grid_dist, 1e-4,
                       "projection distance vs Bloch grid, case " +
                           std::to_string(trial));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.uniform_index(5);
    std::vector<double> v(d);
    for (double& x : v) x = 3.0 * rng.gaussian();
    const std::vector<double> got = simplex_project(v);
    const std::vector<double> expected = oracle::simplex_project_bruteforce(v);
    for (std::size_t i = 0; i < d; ++i) {
      check.require_near(got[i], expected[i], 1e-6,
                         "simplex projection entry, case " + std::to_string(trial));
    }
  }
}

// --------------------------------------------------------------------------
// 11. Determinism: byte-identical report bodies on repeat runs.

void criterion_11(Checker& check) {
  ExperimentSpec gen = base_spec(ExperimentKind::generalization_sweep);
  gen.n_qubits = 1;
  gen.source = MeasurementSource::haar_projector(1, 1);
  gen.m_values = {10, 50};
  gen.gamma = 0.1;
  gen.eta = 0.05;
  gen.learner.eta = 0.05;
  gen.n_test = 100;
  gen.seeds = {1, 2, 3};
  check.require(report_body(run_generalization_sweep(gen)).dump() ==
                    report_body(run_generalization_sweep(gen)).dump(),
                "generalization report bodies byte-identical");

  ExperimentSpec lb = base_spec(ExperimentKind::lower_bound);
  lb.n_qubits = 4;
  lb.state.type = StateSpec::Type::hard_instance;
  lb.state.k = 4;
  lb.state.gamma = 0.45;
  lb.gamma = 0.45;
  lb.epsilon = 0.1;
  lb.eta = 0.01;
  lb.learner.eta = 0.01;
  lb.n_test = 1;
  lb.m_values = {0, 50};
  lb.seeds = {7, 8, 9, 10};
  check.require(report_body(run_lower_bound_experiment(lb)).dump() ==
                    report_body(run_lower_bound_experiment(lb)).dump(),
                "lower-bound report bodies byte-identical");
}

struct Criterion {
  int number;
  const char* name;
  double time_limit_s;  // 0 = no stated limit
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "validity fuzz: 100 learner runs pass state invariants at 1e-8", 60.0,
       criterion_1},
      {2, "exact-label feasibility: 50/50 converged with residual <= eta", 30.0,
       criterion_2},
      {3, "generalization trend: median error non-increasing, <= 0.15 at m=400",
       120.0, criterion_3},
      {4, "measure-once learner: median error <= 0.2 at m=2000", 60.0,
       criterion_4},
      {5, "quantum union bound: survival <= m sqrt(eps), Monte Carlo 3 sigma",
       0.0, criterion_5},
      {6, "witness procedure: exact bounds at T=12, Monte Carlo at T=100", 0.0,
       criterion_6},
      {7, "one-way simulation: error <= 1/3 in >= 9/10 seeds, eta <= 0.16", 0.0,
       criterion_7},
      {8, "bounds: oracle match at 100 points, named preconditions, 346", 0.0,
       criterion_8},
      {9, "lower-bound experiment: >= 0.25 at m=5, <= 0.05 at m=2000", 180.0,
       criterion_9},
      {10, "projection oracles within 1e-4 / 1e-6 on 50 cases", 0.0,
       criterion_10},
      {11, "determinism: byte-identical report bodies", 0.0, criterion_11},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    Checker check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s) {
      check.failures.push_back("runtime " + std::to_string(elapsed) +
                               "s exceeds limit " +
                               std::to_string(criterion.time_limit_s) + "s");
    }
    if (check.failures.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", criterion.number,
                  criterion.name, elapsed);
    } else {
      ++failed;
      std::printf("[FAIL] criterion %2d: %s (%.1fs)\n", criterion.number,
                  criterion.name, elapsed);
      for (const std::string& failure : check.failures) {
        std::printf("        - %s\n", failure.c_str());
      }
    }
  }
  if (failed == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d of %zu acceptance criteria FAILED\n", failed, criteria.size());
  }
  return failed;
}
