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

#include "pgt/learner.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "pgt/qmatrix.hpp"

namespace pgt {

namespace {

// Loss <= this bar counts as a satisfied feasibility search.
constexpr double kFeasibleLossBar = 1e-12;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-18;
constexpr double kRelImprovement = 1e-9;

// Training sets drawn from finite distributions repeat the same effect many
// times. Grouping identical effects collapses the per-iteration trace count
// from m to the number of distinct effects; sparse effects additionally get a
// nonzero-only inner product. Labels stay per-sample, so every loss below is
// the exact ungrouped sum.
class CompiledTraining {
 public:
  explicit CompiledTraining(const TrainingSet& train) : dim_(train.dim()) {
    const auto& effects = train.effects();
    const auto& labels = train.labels();
    std::unordered_map<const void*, std::size_t> by_storage;
    for (std::size_t i = 0; i < effects.size(); ++i) {
      const void* key = effects[i].matrix().entries().data();
      auto [it, inserted] = by_storage.try_emplace(key, groups_.size());
      if (inserted) {
        groups_.push_back(Group{});
        compile_entries(groups_.back(), effects[i]);
      }
      groups_[it->second].labels.push_back(labels[i]);
    }
    merge_value_duplicates();
    expectations_.resize(groups_.size());
  }

  std::size_t dim() const { return dim_; }
  std::size_t group_count() const { return groups_.size(); }
  const std::vector<double>& group_labels(std::size_t g) const {
    return groups_[g].labels;
  }

  /// Per-group Tr(E_g sigma), cached for the most recent sigma so a gradient
  /// evaluation right after a value evaluation is free. The cache keeps a
  /// copy of the state (shared storage), so the keyed address cannot be
  /// recycled by a newer allocation while cached.
  const std::vector<double>& expectations(const DensityMatrix& sigma) const {
    const cplx* key = sigma.matrix().entries().data();
    if (cached_state_ && cached_state_->matrix().entries().data() == key) {
      return expectations_;
    }
    std::span<const cplx> state = sigma.matrix().entries();
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      expectations_[g] = group_expectation(groups_[g], state);
    }
    cached_state_ = sigma;
    return expectations_;
  }

  /// sum_g coeff[g] * E_g as an exactly Hermitian matrix.
  HermitianMatrix accumulate(const std::vector<double>& coeff) const {
    std::vector<cplx> acc(dim_ * dim_);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const double c = coeff[g];
      if (c == 0.0) continue;
      const Group& grp = groups_[g];
      if (grp.sparse) {
        for (const auto& [idx, val] : grp.nonzeros) acc[idx] += c * val;
      } else {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * grp.entries[i];
      }
    }
    return HermitianMatrix::from_entries_unchecked(dim_, std::move(acc));
  }

 private:
  struct Group {
    std::span<const cplx> entries;
    std::shared_ptr<const void> keepalive;  // pins the shared effect storage
    bool sparse = false;
    std::vector<std::pair<std::uint32_t, cplx>> nonzeros;
    std::vector<double> labels;
  };

  void compile_entries(Group& g, const Effect& e) {
    g.entries = e.matrix().entries();
    g.keepalive = std::make_shared<Effect>(e);
    std::size_t nnz = 0;
    for (const cplx& z : g.entries) {
      if (z != cplx{0.0, 0.0}) ++nnz;
    }
    if (nnz * 4 <= g.entries.size()) {
      g.sparse = true;
      g.nonzeros.reserve(nnz);
      for (std::size_t i = 0; i < g.entries.size(); ++i) {
        if (g.entries[i] != cplx{0.0, 0.0}) {
          g.nonzeros.emplace_back(std::uint32_t(i), g.entries[i]);
        }
      }
    }
  }

  // Distinct allocations can still hold identical entries (e.g. effects
  // rebuilt from a config file); fold those together too.
  void merge_value_duplicates() {
    std::vector<Group> merged;
    for (Group& g : groups_) {
      bool folded = false;
      for (Group& m : merged) {
        if (m.entries.size() == g.entries.size() &&
            std::memcmp(m.entries.data(), g.entries.data(),
                        g.entries.size() * sizeof(cplx)) == 0) {
          m.labels.insert(m.labels.end(), g.labels.begin(), g.labels.end());
          folded = true;
          break;
        }
      }
      if (!folded) merged.push_back(std::move(g));
    }
    groups_ = std::move(merged);
  }

  static double group_expectation(const Group& g, std::span<const cplx> state) {
    double acc = 0.0;
    if (g.sparse) {
      for (const auto& [idx, val] : g.nonzeros) {
        acc += val.real() * state[idx].real() + val.imag() * state[idx].imag();
      }
    } else {
      for (std::size_t i = 0; i < state.size(); ++i) {
        acc += g.entries[i].real() * state[i].real() +
               g.entries[i].imag() * state[i].imag();
      }
    }
    return acc;
  }

  std::size_t dim_;
  std::vector<Group> groups_;
  mutable std::vector<double> expectations_;
  mutable std::optional<DensityMatrix> cached_state_;
};

double frobenius_dist2(const HermitianMatrix& a, const HermitianMatrix& b) {
  std::span<const cplx> ae = a.entries();
  std::span<const cplx> be = b.entries();
  double s = 0.0;
  for (std::size_t i = 0; i < ae.size(); ++i) s += std::norm(ae[i] - be[i]);
  return s;
}

bool all_finite(const HermitianMatrix& m) {
  for (const cplx& z : m.entries()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

DensityMatrix initial_state(const LearnerConfig& config, std::size_t dim) {
  if (config.init_state) {
    if (config.init_state->dim() != dim) {
      throw ValidationError("learner: init_state dimension mismatch");
    }
    return *config.init_state;
  }
  return DensityMatrix::maximally_mixed(dim);
}

void validate_config(const LearnerConfig& config) {
  if (config.max_iters < 1) {
    throw ValidationError("learner: max_iters must be >= 1");
  }
  if (!(config.tol > 0.0)) throw ValidationError("learner: tol must be > 0");
}

double max_residual_of(const CompiledTraining& compiled,
                       const DensityMatrix& sigma) {
  const std::vector<double>& x = compiled.expectations(sigma);
  double worst = 0.0;
  for (std::size_t g = 0; g < compiled.group_count(); ++g) {
    for (double label : compiled.group_labels(g)) {
      worst = std::max(worst, std::abs(x[g] - label));
    }
  }
  return worst;
}

}  // namespace

TrainingSet::TrainingSet(LabelKind kind, std::size_t dim,
                         std::vector<Effect> effects, std::vector<double> labels)
    : kind_(kind),
      dim_(dim),
      effects_(std::move(effects)),
      labels_(std::move(labels)) {}

TrainingSet TrainingSet::probabilities(std::vector<Effect> effects,
                                       std::vector<double> labels) {
  if (effects.empty() || effects.size() != labels.size()) {
    throw ValidationError("TrainingSet: effects and labels must align");
  }
  const std::size_t dim = effects.front().dim();
  for (const Effect& e : effects) {
    if (e.dim() != dim) throw ValidationError("TrainingSet: mixed dimensions");
  }
  for (double p : labels) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("TrainingSet: probability label outside [0, 1]");
    }
  }
  return TrainingSet(LabelKind::probability, dim, std::move(effects),
                     std::move(labels));
}

TrainingSet TrainingSet::bits(std::vector<Effect> effects,
                              std::vector<std::uint8_t> labels) {
  if (effects.empty() || effects.size() != labels.size()) {
    throw ValidationError("TrainingSet: effects and labels must align");
  }
  const std::size_t dim = effects.front().dim();
  for (const Effect& e : effects) {
    if (e.dim() != dim) throw ValidationError("TrainingSet: mixed dimensions");
  }
  std::vector<double> as_double(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw ValidationError("TrainingSet: bit label not 0/1");
    as_double[i] = double(labels[i]);
  }
  return TrainingSet(LabelKind::bit, dim, std::move(effects),
                     std::move(as_double));
}

TrainingSet TrainingSet::empty(std::size_t dim, LabelKind kind) {
  if (dim < 1) throw ValidationError("TrainingSet: dim must be >= 1");
  return TrainingSet(kind, dim, {}, {});
}

LearnedHypothesis projected_gradient_minimize(const MatrixLoss& loss,
                                              std::size_t dim,
                                              const LearnerConfig& config,
                                              const IterationObserver& observer) {
  validate_config(config);
  DensityMatrix sigma = initial_state(config, dim);
  double f = loss.value(sigma);
  if (!std::isfinite(f)) throw NumericalError("minimize: non-finite loss");

  DensityMatrix best = sigma;
  double best_f = f;
  double step = config.step_init > 0.0 ? config.step_init : 1.0;
  int iterations = 0;
  bool converged = f <= config.tol;

  for (int iter = 1; iter <= config.max_iters && !converged; ++iter) {
    const HermitianMatrix grad = loss.gradient(sigma);
    if (!all_finite(grad)) throw NumericalError("minimize: non-finite gradient");

    bool accepted = false;
    DensityMatrix candidate = sigma;
    double fc = f;
    while (step >= kMinStep) {
      candidate = project_to_density(sigma.matrix() - grad.scaled(step));
      const double dist2 = frobenius_dist2(candidate.matrix(), sigma.matrix());
      if (dist2 == 0.0) {
        // Projection fixed point: no feasible descent direction remains.
        converged = true;
        break;
      }
      fc = loss.value(candidate);
      if (!std::isfinite(fc)) throw NumericalError("minimize: non-finite loss");
      if (fc <= f - kArmijo * dist2 / step) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = converged || step < kMinStep;
      break;
    }

    const double improvement = f - fc;
    sigma = candidate;
    f = fc;
    iterations = iter;
    if (observer) observer(iter, f);
    if (f < best_f) {
      best_f = f;
      best = sigma;
    }
    if (f <= config.tol) {
      converged = true;
      break;
    }
    if (improvement < kRelImprovement * std::max(f + improvement, 1e-300)) {
      converged = true;
      break;
    }
    step = std::min(step * 2.0, config.step_init > 0.0 ? config.step_init : 1.0);
  }

  return LearnedHypothesis{best, best_f, iterations, converged, 0.0};
}

LearnedHypothesis learn_feasible(const TrainingSet& train,
                                 const LearnerConfig& config) {
  if (train.label_kind() != TrainingSet::LabelKind::probability) {
    throw ValidationError("learn_feasible: probability labels required");
  }
  if (!(config.eta > 0.0)) {
    throw ValidationError("learn_feasible: eta must be > 0");
  }
  validate_config(config);
  if (train.size() == 0) {
    // Vacuous constraints: every state is feasible.
    LearnedHypothesis out{initial_state(config, train.dim()), 0.0, 0, true, 0.0};
    return out;
  }

  CompiledTraining compiled(train);
  const double eta = config.eta;

  MatrixLoss loss;
  loss.value = [&compiled, eta](const DensityMatrix& sigma) {
    const std::vector<double>& x = compiled.expectations(sigma);
    double total = 0.0;
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double p : compiled.group_labels(g)) {
        const double excess = std::abs(x[g] - p) - eta;
        if (excess > 0.0) total += excess * excess;
      }
    }
    return total;
  };
  loss.gradient = [&compiled, eta](const DensityMatrix& sigma) {
    const std::vector<double>& x = compiled.expectations(sigma);
    std::vector<double> coeff(compiled.group_count(), 0.0);
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double p : compiled.group_labels(g)) {
        const double r = x[g] - p;
        const double excess = std::abs(r) - eta;
        if (excess > 0.0) coeff[g] += 2.0 * excess * (r >= 0.0 ? 1.0 : -1.0);
      }
    }
    return compiled.accumulate(coeff);
  };

  LearnerConfig solver = config;
  solver.tol = std::min(config.tol, kFeasibleLossBar * 0.1);
  LearnedHypothesis result =
      projected_gradient_minimize(loss, train.dim(), solver);
  result.converged = result.final_loss <= kFeasibleLossBar;
  result.max_residual = max_residual_of(compiled, result.sigma);
  return result;
}

LearnedHypothesis learn_quadratic(const TrainingSet& train,
                                  const LearnerConfig& config) {
  if (train.label_kind() != TrainingSet::LabelKind::bit) {
    throw ValidationError("learn_quadratic: bit labels required");
  }
  validate_config(config);
  if (train.size() == 0) {
    return LearnedHypothesis{initial_state(config, train.dim()), 0.0, 0, false,
                             0.0};
  }

  CompiledTraining compiled(train);
  MatrixLoss loss;
  loss.value = [&compiled](const DensityMatrix& sigma) {
    const std::vector<double>& x = compiled.expectations(sigma);
    double total = 0.0;
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double b : compiled.group_labels(g)) {
        const double r = x[g] - b;
        total += r * r;
      }
    }
    return total;
  };
  loss.gradient = [&compiled](const DensityMatrix& sigma) {
    const std::vector<double>& x = compiled.expectations(sigma);
    std::vector<double> coeff(compiled.group_count(), 0.0);
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double b : compiled.group_labels(g)) coeff[g] += 2.0 * (x[g] - b);
    }
    return compiled.accumulate(coeff);
  };

  LearnedHypothesis result =
      projected_gradient_minimize(loss, train.dim(), config);
  result.max_residual = max_residual_of(compiled, result.sigma);
  return result;
}

LearnedHypothesis learn_absolute(const TrainingSet& train,
                                 const LearnerConfig& config) {
  if (train.label_kind() != TrainingSet::LabelKind::bit) {
    throw ValidationError("learn_absolute: bit labels required");
  }
  validate_config(config);
  if (train.size() == 0) {
    return LearnedHypothesis{initial_state(config, train.dim()), 0.0, 0, false,
                             0.0};
  }

  CompiledTraining compiled(train);
  auto loss_at = [&compiled](const DensityMatrix& sigma) {
    const std::vector<double>& x = compiled.expectations(sigma);
    double total = 0.0;
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double b : compiled.group_labels(g)) total += std::abs(x[g] - b);
    }
    return total;
  };

  DensityMatrix sigma = initial_state(config, train.dim());
  DensityMatrix best = sigma;
  double best_f = loss_at(sigma);
  int iterations = 0;
  bool converged = best_f <= config.tol;
  const double step0 = config.step_init > 0.0 ? config.step_init : 1.0;

  for (int t = 1; t <= config.max_iters && !converged; ++t) {
    const std::vector<double>& x = compiled.expectations(sigma);
    std::vector<double> coeff(compiled.group_count(), 0.0);
    for (std::size_t g = 0; g < compiled.group_count(); ++g) {
      for (double b : compiled.group_labels(g)) {
        const double r = x[g] - b;
        if (r > 0.0) {
          coeff[g] += 1.0;
        } else if (r < 0.0) {
          coeff[g] -= 1.0;
        }
      }
    }
    HermitianMatrix sub = compiled.accumulate(coeff);
    if (!all_finite(sub)) throw NumericalError("learn_absolute: non-finite subgradient");
    const double norm = sub.frobenius_norm();
    if (norm == 0.0) {
      converged = true;
      break;
    }
    // Normalized subgradient step: scale-free in m and in the effect norms.
    const double step = step0 / (std::sqrt(double(t)) * norm);
    sigma = project_to_density(sigma.matrix() - sub.scaled(step));
    iterations = t;
    const double f = loss_at(sigma);
    if (!std::isfinite(f)) throw NumericalError("learn_absolute: non-finite loss");
    if (f < best_f) {
      best_f = f;
      best = sigma;
      if (best_f <= config.tol) converged = true;
    }
  }

  LearnedHypothesis result{best, best_f, iterations, converged, 0.0};
  result.max_residual = max_residual_of(compiled, result.sigma);
  return result;
}

double evaluate_generalization(const DensityMatrix& sigma,
                               const DensityMatrix& rho,
                               const MeasurementSource& source, double gamma,
                               int n_test, RngStream& rng) {
  if (sigma.dim() != rho.dim() || source.dim() != rho.dim()) {
    throw ValidationError("evaluate_generalization: dimension mismatch");
  }
  if (!(gamma > 0.0)) {
    throw ValidationError("evaluate_generalization: gamma must be > 0");
  }
  if (n_test < 1) {
    throw ValidationError("evaluate_generalization: n_test must be >= 1");
  }
  int bad = 0;
  for (int i = 0; i < n_test; ++i) {
    const Effect e = sample_effect(source, rng);
    if (std::abs(expectation(e, sigma) - expectation(e, rho)) > gamma) ++bad;
  }
  return double(bad) / double(n_test);
}

PredictionMetrics prediction_metrics(const DensityMatrix& sigma,
                                     const DensityMatrix& rho,
                                     const MeasurementSource& source,
                                     int n_test, RngStream& rng) {
  if (sigma.dim() != rho.dim() || source.dim() != rho.dim()) {
    throw ValidationError("prediction_metrics: dimension mismatch");
  }
  if (n_test < 1) {
    throw ValidationError("prediction_metrics: n_test must be >= 1");
  }
  double delta_sum = 0.0;
  double guess_sum = 0.0;
  for (int i = 0; i < n_test; ++i) {
    const Effect e = sample_effect(source, rng);
    const double ps = expectation(e, sigma);
    const double pr = expectation(e, rho);
    delta_sum += ps * (1.0 - pr) + (1.0 - ps) * pr;
    guess_sum += 0.5 * (1.0 + std::abs(2.0 * pr - 1.0));
  }
  PredictionMetrics out;
  out.mean_delta = delta_sum / double(n_test);
  out.agreement = 1.0 - out.mean_delta;
  out.guess_rule_success = guess_sum / double(n_test);
  return out;
}

}  // namespace pgt
