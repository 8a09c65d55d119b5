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

#include "pgt/harness_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pgt {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ValidationError(context + ": expected an object");
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& context) {
  std::string unknown;
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw ValidationError(context + ": unknown keys: " + unknown);
  }
}

const json& require_key(const json& j, const std::string& key,
                        const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(context + ": missing required key '" + key + "'");
  }
  return *it;
}

double get_number(const json& j, const std::string& context) {
  if (!j.is_number()) throw ValidationError(context + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& context) {
  if (!j.is_number_integer()) {
    throw ValidationError(context + ": expected an integer");
  }
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& context) {
  if (!j.is_boolean()) throw ValidationError(context + ": expected a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& context) {
  if (!j.is_string()) throw ValidationError(context + ": expected a string");
  return j.get<std::string>();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("emit_report: cannot open " + tmp.string());
    out << body;
    if (!out) throw NumericalError("emit_report: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

HermitianMatrix parse_matrix_literal(const json& j, const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(j, {"dim", "entries"}, context);
  const int dim = get_int(require_key(j, "dim", context), context + ".dim");
  if (dim < 1) throw ValidationError(context + ".dim: must be >= 1");
  const json& entries = require_key(j, "entries", context);
  if (!entries.is_array() || entries.size() != std::size_t(dim) * std::size_t(dim)) {
    throw ValidationError(context + ".entries: expected dim*dim [re, im] pairs");
  }
  std::vector<cplx> values;
  values.reserve(entries.size());
  for (const json& pair : entries) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ValidationError(context + ".entries: each entry is [re, im]");
    }
    values.emplace_back(get_number(pair[0], context + ".entries.re"),
                        get_number(pair[1], context + ".entries.im"));
  }
  return HermitianMatrix::from_entries(std::size_t(dim), std::move(values));
}

json matrix_literal(const HermitianMatrix& m) {
  json entries = json::array();
  for (const cplx& z : m.entries()) {
    entries.push_back(json::array({z.real(), z.imag()}));
  }
  return json{{"dim", m.dim()}, {"entries", std::move(entries)}};
}

MeasurementSource parse_source(const json& j, const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(
      j, {"kind", "n_qubits", "rank", "noise_scale", "effects", "weights"},
      context);
  const std::string kind =
      get_string(require_key(j, "kind", context), context + ".kind");
  const double noise =
      j.contains("noise_scale")
          ? get_number(j["noise_scale"], context + ".noise_scale")
          : 0.0;
  if (noise < 0.0) throw ValidationError(context + ".noise_scale: must be >= 0");

  if (kind == "finite_list") {
    const json& effects_json = require_key(j, "effects", context);
    const json& weights_json = require_key(j, "weights", context);
    if (!effects_json.is_array() || !weights_json.is_array()) {
      throw ValidationError(context + ": effects and weights must be arrays");
    }
    std::vector<Effect> effects;
    for (std::size_t i = 0; i < effects_json.size(); ++i) {
      effects.emplace_back(parse_matrix_literal(
          effects_json[i], context + ".effects[" + std::to_string(i) + "]"));
    }
    std::vector<double> weights;
    for (const json& w : weights_json) {
      weights.push_back(get_number(w, context + ".weights"));
    }
    return MeasurementSource::finite_list(std::move(effects), std::move(weights),
                                          noise);
  }

  const int n = get_int(require_key(j, "n_qubits", context), context + ".n_qubits");
  if (kind == "haar_projector") {
    const int rank =
        j.contains("rank") ? get_int(j["rank"], context + ".rank") : 1;
    return MeasurementSource::haar_projector(n, rank, noise);
  }
  if (kind == "pauli_local") return MeasurementSource::pauli_local(n, noise);
  if (kind == "spectral") return MeasurementSource::spectral(n, noise);
  throw ValidationError(context + ".kind: unknown source kind '" + kind + "'");
}

json source_to_json(const MeasurementSource& s) {
  json j;
  switch (s.kind) {
    case MeasurementSource::Kind::haar_projector:
      j["kind"] = "haar_projector";
      j["n_qubits"] = s.n_qubits;
      j["rank"] = s.rank;
      break;
    case MeasurementSource::Kind::pauli_local:
      j["kind"] = "pauli_local";
      j["n_qubits"] = s.n_qubits;
      break;
    case MeasurementSource::Kind::spectral:
      j["kind"] = "spectral";
      j["n_qubits"] = s.n_qubits;
      break;
    case MeasurementSource::Kind::finite_list: {
      j["kind"] = "finite_list";
      json effects = json::array();
      for (const Effect& e : s.effects) effects.push_back(matrix_literal(e.matrix()));
      j["effects"] = std::move(effects);
      j["weights"] = s.weights;
      break;
    }
  }
  if (s.noise_scale > 0.0) j["noise_scale"] = s.noise_scale;
  return j;
}

namespace {

StateSpec parse_state(const json& j, const std::string& context) {
  require_object(j, context);
  StateSpec out;
  const std::string type =
      get_string(require_key(j, "type", context), context + ".type");
  if (type == "pure") {
    out.type = StateSpec::Type::pure;
    reject_unknown_keys(j, {"type"}, context);
  } else if (type == "mixed") {
    out.type = StateSpec::Type::mixed;
    reject_unknown_keys(j, {"type", "rank"}, context);
    out.rank = get_int(require_key(j, "rank", context), context + ".rank");
  } else if (type == "hard_instance") {
    out.type = StateSpec::Type::hard_instance;
    reject_unknown_keys(j, {"type", "k", "gamma"}, context);
    out.k = get_int(require_key(j, "k", context), context + ".k");
    out.gamma = get_number(require_key(j, "gamma", context), context + ".gamma");
  } else {
    throw ValidationError(context + ".type: unknown state type '" + type + "'");
  }
  return out;
}

json state_to_json(const StateSpec& s) {
  switch (s.type) {
    case StateSpec::Type::pure:
      return json{{"type", "pure"}};
    case StateSpec::Type::mixed:
      return json{{"type", "mixed"}, {"rank", s.rank}};
    default:
      return json{{"type", "hard_instance"}, {"k", s.k}, {"gamma", s.gamma}};
  }
}

LabelSpec parse_labels(const json& j, const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(j, {"mode", "copies"}, context);
  LabelSpec out;
  const std::string mode =
      get_string(require_key(j, "mode", context), context + ".mode");
  if (mode == "exact") {
    out.mode = LabelSpec::Mode::exact;
  } else if (mode == "estimate") {
    out.mode = LabelSpec::Mode::estimate;
    out.copies = get_int(require_key(j, "copies", context), context + ".copies");
    if (out.copies < 1) throw ValidationError(context + ".copies: must be >= 1");
  } else {
    throw ValidationError(context + ".mode: unknown label mode '" + mode + "'");
  }
  return out;
}

json labels_to_json(const LabelSpec& s) {
  if (s.mode == LabelSpec::Mode::exact) return json{{"mode", "exact"}};
  return json{{"mode", "estimate"}, {"copies", s.copies}};
}

void parse_learner(const json& j, const std::string& context,
                   ExperimentSpec& spec) {
  require_object(j, context);
  reject_unknown_keys(
      j, {"rule", "max_iters", "step_init", "tol", "init_state"}, context);
  if (j.contains("rule")) {
    const std::string rule = get_string(j["rule"], context + ".rule");
    spec.rule_explicit = true;
    if (rule == "feasible") {
      spec.rule = LearnerRule::feasible;
    } else if (rule == "quadratic") {
      spec.rule = LearnerRule::quadratic;
    } else if (rule == "absolute") {
      spec.rule = LearnerRule::absolute;
    } else {
      throw ValidationError(context + ".rule: unknown rule '" + rule + "'");
    }
  }
  if (j.contains("max_iters")) {
    spec.learner.max_iters = get_int(j["max_iters"], context + ".max_iters");
  }
  if (j.contains("step_init")) {
    spec.learner.step_init = get_number(j["step_init"], context + ".step_init");
  }
  if (j.contains("tol")) {
    spec.learner.tol = get_number(j["tol"], context + ".tol");
  }
  if (j.contains("init_state")) {
    spec.learner.init_state = DensityMatrix(
        parse_matrix_literal(j["init_state"], context + ".init_state"));
  }
}

json learner_to_json(const ExperimentSpec& spec) {
  json j;
  if (spec.rule_explicit) {
    switch (spec.rule) {
      case LearnerRule::feasible:
        j["rule"] = "feasible";
        break;
      case LearnerRule::quadratic:
        j["rule"] = "quadratic";
        break;
      case LearnerRule::absolute:
        j["rule"] = "absolute";
        break;
    }
  }
  j["max_iters"] = spec.learner.max_iters;
  j["step_init"] = spec.learner.step_init;
  j["tol"] = spec.learner.tol;
  if (spec.learner.init_state) {
    j["init_state"] = matrix_literal(spec.learner.init_state->matrix());
  }
  return j;
}

AdaptiveSpec parse_adaptive(const json& j, const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(j, {"rounds", "truth_table", "branch_sources"}, context);
  AdaptiveSpec out;
  out.rounds = get_int(require_key(j, "rounds", context), context + ".rounds");
  const json& table = require_key(j, "truth_table", context);
  if (!table.is_array()) {
    throw ValidationError(context + ".truth_table: expected an array");
  }
  for (const json& b : table) {
    out.truth_table.push_back(get_int(b, context + ".truth_table"));
  }
  if (j.contains("branch_sources")) {
    require_object(j["branch_sources"], context + ".branch_sources");
    for (const auto& [key, value] : j["branch_sources"].items()) {
      for (char c : key) {
        if (c != '0' && c != '1') {
          throw ValidationError(context + ".branch_sources: keys are bit strings");
        }
      }
      out.branch_sources.emplace(
          key, parse_source(value, context + ".branch_sources." + key));
    }
  }
  return out;
}

json adaptive_to_json(const AdaptiveSpec& s) {
  json j;
  j["rounds"] = s.rounds;
  j["truth_table"] = s.truth_table;
  if (!s.branch_sources.empty()) {
    json sources = json::object();
    for (const auto& [key, src] : s.branch_sources) {
      sources[key] = source_to_json(src);
    }
    j["branch_sources"] = std::move(sources);
  }
  return j;
}

}  // namespace

ExperimentSpec parse_spec(const json& j) {
  require_object(j, "spec");
  reject_unknown_keys(j,
                      {"schema_version", "kind", "n_qubits", "state", "source",
                       "labels", "m_values", "gamma", "eta", "epsilon",
                       "n_test", "seeds", "learner", "adaptive",
                       "control_force_sigma"},
                      "spec");
  if (j.contains("schema_version") &&
      get_int(j["schema_version"], "spec.schema_version") != 1) {
    throw ValidationError("spec.schema_version: only version 1 is supported");
  }

  ExperimentSpec spec;
  const std::string kind =
      get_string(require_key(j, "kind", "spec"), "spec.kind");
  if (kind == "generalization_sweep") {
    spec.kind = ExperimentKind::generalization_sweep;
  } else if (kind == "measure_once_sweep") {
    spec.kind = ExperimentKind::measure_once_sweep;
  } else if (kind == "adaptive") {
    spec.kind = ExperimentKind::adaptive;
  } else if (kind == "lower_bound") {
    spec.kind = ExperimentKind::lower_bound;
  } else {
    throw ValidationError("spec.kind: unknown kind '" + kind + "'");
  }

  spec.n_qubits = get_int(require_key(j, "n_qubits", "spec"), "spec.n_qubits");
  if (j.contains("state")) spec.state = parse_state(j["state"], "spec.state");
  if (spec.kind != ExperimentKind::lower_bound) {
    spec.source = parse_source(require_key(j, "source", "spec"), "spec.source");
  } else if (j.contains("source")) {
    spec.source = parse_source(j["source"], "spec.source");
  }
  if (j.contains("labels")) spec.labels = parse_labels(j["labels"], "spec.labels");

  const json& m_values = require_key(j, "m_values", "spec");
  if (!m_values.is_array() || m_values.empty()) {
    throw ValidationError("spec.m_values: expected a nonempty array");
  }
  for (const json& m : m_values) {
    spec.m_values.push_back(get_int(m, "spec.m_values"));
  }

  if (j.contains("gamma")) spec.gamma = get_number(j["gamma"], "spec.gamma");
  if (j.contains("eta")) spec.eta = get_number(j["eta"], "spec.eta");
  if (j.contains("epsilon")) spec.epsilon = get_number(j["epsilon"], "spec.epsilon");
  if (j.contains("n_test")) spec.n_test = get_int(j["n_test"], "spec.n_test");

  const json& seeds = require_key(j, "seeds", "spec");
  if (!seeds.is_array() || seeds.empty()) {
    throw ValidationError("spec.seeds: expected a nonempty array");
  }
  for (const json& s : seeds) {
    if (!s.is_number_integer()) {
      throw ValidationError("spec.seeds: expected integers");
    }
    spec.seeds.push_back(s.get<std::uint64_t>());
  }

  if (j.contains("learner")) parse_learner(j["learner"], "spec.learner", spec);
  spec.learner.eta = spec.eta;
  if (j.contains("adaptive")) {
    spec.adaptive = parse_adaptive(j["adaptive"], "spec.adaptive");
  }
  if (j.contains("control_force_sigma")) {
    spec.control_force_sigma =
        get_bool(j["control_force_sigma"], "spec.control_force_sigma");
  }
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["schema_version"] = 1;
  switch (spec.kind) {
    case ExperimentKind::generalization_sweep:
      j["kind"] = "generalization_sweep";
      break;
    case ExperimentKind::measure_once_sweep:
      j["kind"] = "measure_once_sweep";
      break;
    case ExperimentKind::adaptive:
      j["kind"] = "adaptive";
      break;
    case ExperimentKind::lower_bound:
      j["kind"] = "lower_bound";
      break;
  }
  j["n_qubits"] = spec.n_qubits;
  j["state"] = state_to_json(spec.state);
  if (spec.kind != ExperimentKind::lower_bound) {
    j["source"] = source_to_json(spec.source);
  }
  j["labels"] = labels_to_json(spec.labels);
  j["m_values"] = spec.m_values;
  j["gamma"] = spec.gamma;
  j["eta"] = spec.eta;
  j["epsilon"] = spec.epsilon;
  j["n_test"] = spec.n_test;
  j["seeds"] = spec.seeds;
  j["learner"] = learner_to_json(spec);
  if (spec.adaptive) j["adaptive"] = adaptive_to_json(*spec.adaptive);
  if (spec.control_force_sigma) j["control_force_sigma"] = true;
  return j;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_spec: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("load_spec: " + path.string() + ": " + e.what());
  }
  return parse_spec(j);
}

namespace {

json row_to_json(const ReportRow& row) {
  json j;
  j["seed"] = row.seed;
  j["m"] = row.m;
  j["test_error"] = row.test_error ? json(*row.test_error) : json(nullptr);
  j["final_loss"] = row.final_loss;
  j["converged"] = row.converged;
  j["iterations"] = row.iterations;
  j["max_residual"] = row.max_residual;
  j["failed"] = row.failed;
  if (!row.error.empty()) j["error"] = row.error;
  if (row.trial_failed) j["trial_failed"] = *row.trial_failed;
  if (row.estimate) j["estimate"] = *row.estimate;
  if (row.exact_value) j["exact_value"] = *row.exact_value;
  j["wall_ms"] = row.wall_ms;
  return j;
}

}  // namespace

json report_to_json(const Report& report) {
  json j;
  j["artifact_version"] = report.artifact_version;
  j["spec"] = spec_to_json(report.spec);
  j["rng"] = json{{"scheme", report.rng_scheme}, {"seeds", report.spec.seeds}};
  json rows = json::array();
  for (const ReportRow& row : report.rows) rows.push_back(row_to_json(row));
  j["rows"] = std::move(rows);
  json aggregates = json::array();
  for (const AggregateRow& agg : report.aggregates) {
    json a;
    a["m"] = agg.m;
    a["median_test_error"] = std::isnan(agg.median_test_error)
                                 ? json(nullptr)
                                 : json(agg.median_test_error);
    a["median_final_loss"] = std::isnan(agg.median_final_loss)
                                 ? json(nullptr)
                                 : json(agg.median_final_loss);
    a["failure_rate"] = agg.failure_rate;
    aggregates.push_back(std::move(a));
  }
  j["aggregates"] = std::move(aggregates);
  return j;
}

json report_body(const Report& report) {
  json j = report_to_json(report);
  for (json& row : j["rows"]) row.erase("wall_ms");
  return j;
}

std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "seed,m,test_error,final_loss,converged,iterations,max_residual,"
         "failed,trial_failed,estimate,exact_value\n";
  for (const ReportRow& row : report.rows) {
    out << row.seed << ',' << row.m << ',';
    if (row.test_error) out << format_double(*row.test_error);
    out << ',' << format_double(row.final_loss) << ','
        << (row.converged ? 1 : 0) << ',' << row.iterations << ','
        << format_double(row.max_residual) << ',' << (row.failed ? 1 : 0)
        << ',';
    if (row.trial_failed) out << (*row.trial_failed ? 1 : 0);
    out << ',';
    if (row.estimate) out << format_double(*row.estimate);
    out << ',';
    if (row.exact_value) out << format_double(*row.exact_value);
    out << '\n';
  }
  return out.str();
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  atomic_write(dir / "report.json", report_to_json(report).dump(2) + "\n");
  atomic_write(dir / "rows.csv", report_to_csv(report));
}

}  // namespace pgt
