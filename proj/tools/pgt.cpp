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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgt/bounds.hpp"
#include "pgt/harness.hpp"
#include "pgt/harness_io.hpp"
#include "pgt/protocols.hpp"

using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PGT_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pgt::ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw pgt::ValidationError(path + ": " + e.what());
  }
  return j;
}

std::uint64_t seed_or_default(const json& j) {
  if (j.contains("seed")) return j["seed"].get<std::uint64_t>();
  return default_seed();
}

pgt::DensityMatrix parse_state(const json& j, const std::string& context,
                               pgt::RngStream& rng) {
  if (j.is_object() && j.contains("random_pure")) {
    return pgt::sample_pure_state(j["random_pure"].get<int>(), rng);
  }
  if (j.is_object() && j.contains("random_mixed")) {
    const json& spec = j["random_mixed"];
    return pgt::sample_mixed_state(spec.at("n_qubits").get<int>(),
                                   spec.at("rank").get<int>(), rng);
  }
  return pgt::DensityMatrix(pgt::parse_matrix_literal(j, context));
}

int run_bounds_grid(const std::string& path) {
  const json grid = load_json(path);
  const auto values = [&grid](const char* key,
                              std::vector<double> fallback) -> std::vector<double> {
    if (!grid.contains(key)) return fallback;
    return grid[key].get<std::vector<double>>();
  };
  const std::vector<std::string> formulas =
      grid.contains("formulas")
          ? grid["formulas"].get<std::vector<std::string>>()
          : std::vector<std::string>{"upper_probability",
                                     "upper_probability_refined",
                                     "upper_measure_once"};
  const std::vector<double> ns = values("n", {4});
  const std::vector<double> gammas = values("gamma", {0.1});
  const std::vector<double> epsilons = values("epsilon", {0.1});
  const std::vector<double> etas = values("eta", {0.0});
  const std::vector<double> deltas = values("delta", {0.1});
  const std::vector<double> ks = values("K", {1.0});
  const std::vector<double> alphas = values("alpha", {0.5});

  std::printf("formula_id,n,gamma,epsilon,eta,delta,K,m\n");
  for (const std::string& formula : formulas) {
    for (double n : ns) {
      for (double g : gammas) {
        for (double e : epsilons) {
          for (double eta : etas) {
            for (double d : deltas) {
              for (double k : ks) {
                pgt::BoundQuery q;
                q.n_qubits = int(n);
                q.gamma = g;
                q.epsilon = e;
                q.eta = eta;
                q.delta = d;
                q.K = k;
                try {
                  pgt::BoundResult res;
                  if (formula == "upper_probability") {
                    res = pgt::m_upper_probability(q);
                  } else if (formula == "upper_probability_refined") {
                    res = pgt::m_upper_probability_refined(q);
                  } else if (formula == "upper_measure_once") {
                    res = pgt::m_upper_measure_once(q);
                  } else if (formula == "upper_prediction") {
                    for (double a : alphas) {
                      pgt::BoundQuery qa = q;
                      qa.alpha = a;
                      res = pgt::m_upper_prediction(qa);
                      std::printf("%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%lld\n",
                                  res.formula_id.c_str(), q.n_qubits, a, e, eta,
                                  d, k, res.m);
                    }
                    continue;
                  } else if (formula == "lower_probability") {
                    q.model = pgt::BoundModel::probability_labels;
                    res = pgt::m_lower(q);
                  } else if (formula == "lower_measure_once") {
                    q.model = pgt::BoundModel::measure_once;
                    res = pgt::m_lower(q);
                  } else {
                    throw pgt::ValidationError("unknown formula '" + formula + "'");
                  }
                  std::printf("%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%lld\n",
                              res.formula_id.c_str(), q.n_qubits, g, e, eta, d,
                              k, res.m);
                } catch (const pgt::ValidationError& err) {
                  std::fprintf(stderr, "skipped %s at n=%g gamma=%g eps=%g: %s\n",
                               formula.c_str(), n, g, e, err.what());
                }
              }
            }
          }
        }
      }
    }
  }
  return 0;
}

int run_protocol_witness(const std::string& path) {
  const json cfg = load_json(path);
  pgt::RngStream rng(seed_or_default(cfg), 0);
  pgt::RngStream state_rng = rng.substream(1);
  const pgt::DensityMatrix rho0 = parse_state(cfg.at("state"), "state", state_rng);

  pgt::WitnessConfig wc;
  wc.T = cfg.at("T").get<int>();
  wc.lambda = cfg.value("lambda", 1.0 / 3.0);
  wc.trials = cfg.value("trials", 10000);
  for (const json& e : cfg.at("effects")) {
    wc.effects.emplace_back(pgt::parse_matrix_literal(e, "effects"));
  }

  pgt::RngStream run_rng = rng.substream(2);
  const pgt::WitnessStats stats = pgt::witness_protect_stats(rho0, wc, run_rng);
  json out;
  out["success_prob"] = stats.success_prob;
  out["conditional_min_expectation"] = stats.conditional_min_expectation;
  out["epsilon"] = stats.epsilon;
  out["bound_success"] = stats.bound_success;
  out["bound_conditional"] = stats.bound_conditional;
  out["exact"] = stats.exact;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_protocol_verify(const std::string& path) {
  const json cfg = load_json(path);
  pgt::RngStream rng(seed_or_default(cfg), 0);
  pgt::RngStream state_rng = rng.substream(1);
  const pgt::DensityMatrix advice =
      parse_state(cfg.at("advice"), "advice", state_rng);
  const pgt::Effect decision(
      pgt::parse_matrix_literal(cfg.at("decision"), "decision"));
  std::vector<pgt::AdviceTest> tests;
  for (const json& t : cfg.at("tests")) {
    tests.push_back(pgt::AdviceTest{
        pgt::Effect(pgt::parse_matrix_literal(t.at("effect"), "tests.effect")),
        t.at("expected").get<int>()});
  }
  const int T = cfg.at("T").get<int>();
  const int trials = cfg.value("trials", 10000);

  pgt::RngStream run_rng = rng.substream(2);
  int accepts = 0, rejects = 0, unknowns = 0;
  for (int i = 0; i < trials; ++i) {
    switch (pgt::verify_advice(decision, advice, tests, T, run_rng)) {
      case pgt::VerifyResult::accept:
        ++accepts;
        break;
      case pgt::VerifyResult::reject:
        ++rejects;
        break;
      default:
        ++unknowns;
        break;
    }
  }
  json out;
  out["trials"] = trials;
  out["accept"] = double(accepts) / trials;
  out["reject"] = double(rejects) / trials;
  out["dont_know"] = double(unknowns) / trials;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_protocol_oneway(const std::string& path) {
  const json cfg = load_json(path);
  const int input_bits = cfg.at("input_bits").get<int>();
  const int codeword_length = cfg.at("codeword_length").get<int>();
  const std::uint64_t code_seed = cfg.value("code_seed", std::uint64_t{0});
  const std::uint32_t x = cfg.at("x").get<std::uint32_t>();
  const int k = cfg.at("k").get<int>();

  pgt::CommProblem problem =
      pgt::make_fingerprint_protocol(input_bits, codeword_length, code_seed);

  if (cfg.contains("distribution")) {
    const json& dist = cfg["distribution"];
    const std::string type = dist.at("type").get<std::string>();
    if (type == "x_plus_random") {
      const int count = dist.at("count").get<int>();
      pgt::RngStream pick(dist.value("seed", std::uint64_t{0}), 17);
      pgt::WeightedSupport support;
      support.values.push_back(x);
      const std::uint32_t domain = std::uint32_t{1} << input_bits;
      while (int(support.values.size()) < count + 1) {
        const std::uint32_t y = std::uint32_t(pick.uniform_index(domain));
        bool seen = false;
        for (std::uint32_t v : support.values) seen = seen || v == y;
        if (!seen) support.values.push_back(y);
      }
      support.weights.assign(support.values.size(),
                             1.0 / double(support.values.size()));
      problem.set_y_distribution(support);
    } else if (type != "uniform") {
      throw pgt::ValidationError(
          "distribution.type must be uniform or x_plus_random");
    }
  }

  pgt::OneWayOptions options;
  options.eta = cfg.value("eta", 0.01);
  options.n_test = cfg.value("n_test", 400);

  std::vector<std::uint64_t> seeds;
  if (cfg.contains("seeds")) {
    seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
  } else {
    seeds = {seed_or_default(cfg)};
  }

  json results = json::array();
  int within_third = 0;
  for (std::uint64_t seed : seeds) {
    pgt::RngStream rng(seed, 0);
    const pgt::OneWayResult res =
        pgt::simulate_one_way(problem, x, k, rng, options);
    json row;
    row["seed"] = seed;
    row["test_error"] = res.test_error_rate;
    row["k"] = res.k_used;
    results.push_back(row);
    if (res.test_error_rate <= 1.0 / 3.0) ++within_third;
  }
  json out;
  out["eta_protocol"] = problem.eta_protocol();
  out["x"] = x;
  out["rows"] = results;
  out["seeds_within_one_third"] = within_third;
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pretty-good tomography toolkit"};
  app.require_subcommand(1);

  std::string learn_spec;
  CLI::App* learn = app.add_subcommand(
      "learn", "run an experiment spec and print the report to stdout");
  learn->add_option("spec", learn_spec, "experiment spec (JSON)")->required();

  std::string grid_path;
  CLI::App* bounds =
      app.add_subcommand("bounds", "print a CSV table of sample-size bounds");
  bounds->add_option("--grid", grid_path, "grid description (JSON)")->required();

  CLI::App* protocol = app.add_subcommand("protocol", "protocol simulations");
  protocol->require_subcommand(1);
  std::string witness_spec, verify_spec, oneway_spec;
  protocol->add_subcommand("witness", "randomized certification sequence")
      ->add_option("spec", witness_spec, "config (JSON)")
      ->required();
  protocol->add_subcommand("verify", "two-phase advice verification")
      ->add_option("spec", verify_spec, "config (JSON)")
      ->required();
  protocol->add_subcommand("oneway", "classical one-way simulation")
      ->add_option("spec", oneway_spec, "config (JSON)")
      ->required();

  std::string experiment_spec, out_dir;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "run an experiment spec and write report files");
  experiment->add_option("spec", experiment_spec, "experiment spec (JSON)")
      ->required();
  experiment->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (learn->parsed()) {
      const pgt::Report report = pgt::run_experiment(pgt::load_spec(learn_spec));
      std::cout << pgt::report_to_json(report).dump(2) << "\n";
      return 0;
    }
    if (bounds->parsed()) return run_bounds_grid(grid_path);
    if (protocol->parsed()) {
      if (protocol->get_subcommand("witness")->parsed()) {
        return run_protocol_witness(witness_spec);
      }
      if (protocol->get_subcommand("verify")->parsed()) {
        return run_protocol_verify(verify_spec);
      }
      return run_protocol_oneway(oneway_spec);
    }
    if (experiment->parsed()) {
      const pgt::Report report =
          pgt::run_experiment(pgt::load_spec(experiment_spec));
      pgt::emit_report(report, out_dir);
      std::printf("wrote %s/report.json and %s/rows.csv (%zu rows)\n",
                  out_dir.c_str(), out_dir.c_str(), report.rows.size());
      return 0;
    }
  } catch (const pgt::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const pgt::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
