// Copyright 2026 The hmmqec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: model analysis and the numerical studies.

#include "hmmqec/errors.hpp"
#include "hmmqec/experiments.hpp"
#include "hmmqec/metrology.hpp"
#include "hmmqec/model.hpp"
#include "hmmqec/qec.hpp"
#include "hmmqec/rng.hpp"
#include "hmmqec/spans.hpp"
#include "hmmqec/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace hmmqec;
using ojson = nlohmann::ordered_json;

struct Globals {
  std::string model;
  std::uint64_t seed = 1;
  long samples = 25000;
  double tolerance = kSpanTol;
  std::string out;
  std::string format = "csv";
  int workers = 1;
};

// Tabular records, written as CSV or JSON lines; a document is a single JSON
// object regardless of format.
class Output {
 public:
  explicit Output(const Globals& g) : g_(g) {
    if (!g.out.empty()) {
      file_.open(g.out);
      if (!file_) throw InputError("cannot open output file: " + g.out);
    }
  }
  std::ostream& stream() { return g_.out.empty() ? std::cout : file_; }

  void record(const ojson& r) {
    std::ostream& os = stream();
    if (g_.format == "jsonl") {
      os << r.dump() << "\n";
      return;
    }
    if (!header_written_) {
      bool first = true;
      for (const auto& [k, v] : r.items()) {
        os << (first ? "" : ",") << k;
        first = false;
      }
      os << "\n";
      header_written_ = true;
    }
    bool first = true;
    for (const auto& [k, v] : r.items()) {
      os << (first ? "" : ",") << csv_cell(v);
      first = false;
    }
    os << "\n";
  }

  void document(const ojson& d) { stream() << d.dump(2) << "\n"; }

 private:
  static std::string csv_cell(const ojson& v) {
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    if (v.is_number_float()) {
      std::ostringstream os;
      os << std::setprecision(17) << v.get<double>();
      return os.str();
    }
    return v.dump();
  }

  const Globals& g_;
  std::ofstream file_;
  bool header_written_ = false;
};

ojson complex_json(Complex z) { return ojson::array({z.real(), z.imag()}); }

ojson vector_json(const ComplexVector& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

ojson regression_json(const RegressionResult& r) {
  return {{"slope", r.slope}, {"intercept", r.intercept}, {"pearson_r", r.pearson_r},
          {"degenerate", r.degenerate}};
}

ojson quantiles_json(const Quantiles& q) {
  return {{"min", q.min}, {"q25", q.q25}, {"median", q.median}, {"q75", q.q75}, {"max", q.max}};
}

HmmModel require_model(const Globals& g) {
  if (g.model.empty()) throw InputError("--model FILE (or --model preset:NAME) is required");
  if (g.model.rfind("preset:", 0) == 0) return preset_model(g.model.substr(7));
  return load_model_file(g.model);
}

// Environment state: a basis index, "+", "mixed", or "haar" (seeded).
ComplexMatrix parse_env(const std::string& spec, int d, std::uint64_t seed, ComplexVector* pure) {
  ComplexVector v;
  if (spec == "mixed") {
    if (pure) throw InputError("--env mixed is not allowed here; a pure state is required");
    return numkit::identity(d) / static_cast<double>(d);
  }
  if (spec == "+") {
    v = ComplexVector::Ones(d) / std::sqrt(static_cast<double>(d));
  } else if (spec == "haar") {
    RngStream rng(seed, 5);
    v = numkit::haar_state(d, rng);
  } else {
    int k = -1;
    try {
      std::size_t pos = 0;
      k = std::stoi(spec, &pos);
      if (pos != spec.size()) k = -1;
    } catch (const std::exception&) {
      k = -1;
    }
    if (k < 0 || k >= d)
      throw InputError("--env must be a basis index in [0, d_E), \"+\", \"mixed\" or \"haar\"; got \"" + spec + "\"");
    v = numkit::basis_vector(d, k);
  }
  if (pure) *pure = v;
  return numkit::ket_bra(v, v);
}

ojson classification_json(const Classification& c) {
  return {{"regime", regime_label(c.regime)},
          {"hnes_residual", c.hnes_residual},
          {"hnls_residual", c.hnls_residual},
          {"hnels_residual", c.hnels_residual},
          {"extended_span_size", c.extended_span_size},
          {"full_span_size", c.full_span_size},
          {"diagonal_span_size", c.diagonal_span_size},
          {"diagonal", c.diagonal},
          {"unitary", c.unitary}};
}

ojson code_json(const CodePlan& plan) {
  const MetrologyCode& c = plan.code;
  return {{"kind", plan.kind},
          {"d_P", c.d_p},
          {"d_A", c.d_a},
          {"lambda0", c.lambda0},
          {"lambda1", c.lambda1},
          {"delta_lambda", c.delta_lambda()},
          {"signal_residual", plan.signal.residual_norm},
          {"c0", vector_json(c.c0)},
          {"c1", vector_json(c.c1)},
          {"recovery_kraus_count", plan.recovery.size()}};
}

// Prepare-and-measure kernel: plain |+i>/X protocol on the probe, or the
// codeword protocol under continuous correction when `qec` is set.
struct Protocol {
  ProtocolConfig cfg;
  RoundKernel kernel;
};

Protocol make_protocol(const HmmModel& model, const ComplexMatrix& env, double dwell, bool qec,
                       const Globals& g) {
  Protocol p;
  if (qec) {
    const CodePlan plan = plan_code(model, g.tolerance);
    p.cfg = codeword_protocol(plan.code, env, dwell, 1, std::max<long>(g.samples, 1), g.seed);
    p.cfg.workers = g.workers;
    p.kernel = make_round_kernel(corrected_liouvillian(model, plan.code, plan.recovery), model.d_e, p.cfg);
  } else {
    p.cfg = default_protocol(env, dwell, 1, std::max<long>(g.samples, 1), g.seed);
    p.cfg.workers = g.workers;
    p.kernel = make_round_kernel(model, p.cfg);
  }
  return p;
}

struct Run {
  Globals g;
  std::string command;
  std::vector<std::string> argv;
  ojson options = ojson::object();
  ojson summary = ojson::object();
  bool has_model = false;
  HmmModel model;

  void write_manifest() const {
    ojson m;
    m["tool"] = "hmmqec";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv;
    m["globals"] = {{"model", g.model}, {"seed", g.seed}, {"samples", g.samples},
                    {"tolerance", g.tolerance}, {"out", g.out}, {"format", g.format},
                    {"workers", g.workers}};
    m["options"] = options;
    if (has_model) m["model"] = model_to_json(model);
    if (!summary.empty()) m["summary"] = summary;
    if (g.out.empty()) {
      std::cerr << m.dump() << "\n";
    } else {
      std::ofstream f(g.out + ".manifest.json");
      if (!f) throw InputError("cannot write manifest " + g.out + ".manifest.json");
      f << m.dump(2) << "\n";
    }
  }

  const HmmModel& load_model() {
    model = require_model(g);
    has_model = true;
    return model;
  }
};

}  // namespace

int main(int argc, char** argv) {
  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
  Globals& g = run.g;

  CLI::App app{"Error-corrected metrology under hidden-Markov noise"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--model", g.model, "Model JSON file, or preset:NAME");
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--samples", g.samples, "Monte Carlo samples per estimate")->check(CLI::NonNegativeNumber);
  app.add_option("--tolerance", g.tolerance, "Span-membership tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (stdout if omitted); the manifest goes to OUT.manifest.json");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--workers", g.workers, "Worker threads for Monte Carlo")->check(CLI::PositiveNumber);

  // Subcommand options.
  std::string env_spec = "0";
  double time = 1.0, dwell = 0.25, threshold = 0.25, t_min = 0.0, t_max = 10.0;
  int grid = 2001, steps = 0, probes = 10, n_max = 40, states = 5, exact_max = 15, count = 50;
  int jumps = 3;
  double gamma = 1.0, rm_dwell = 0.1;
  bool qec = false, env_signal = false;
  std::string protocol = "free";
  std::vector<int> rounds{1};
  std::vector<double> times;

  auto* classify_cmd = app.add_subcommand("classify", "Span-condition verdict for a model");
  auto* code_cmd = app.add_subcommand("build-code", "Construct the two-codeword metrology code");
  auto* kl_cmd = app.add_subcommand("kl-check", "Knill-Laflamme check of the code against extended errors");

  auto* qfi_cmd = app.add_subcommand("qfi", "QFI of the probe after evolution for each time");
  qfi_cmd->add_option("--time", times, "Evolution times (repeat or comma-separate)")->required()->delimiter(',');
  qfi_cmd->add_option("--env", env_spec, "Environment state: index, +, mixed, haar");
  qfi_cmd->add_option("--protocol", protocol, "free | corrected | zeno")
      ->check(CLI::IsMember({"free", "corrected", "zeno"}));
  qfi_cmd->add_option("--steps", steps, "Correction steps for --protocol zeno");

  auto* alpha_cmd = app.add_subcommand("alpha", "Envelope alpha(t) of the unitary protocol on a grid");
  alpha_cmd->add_option("--env", env_spec, "Environment state: index, +, haar");
  alpha_cmd->add_option("--t-max", t_max, "Grid end")->check(CLI::PositiveNumber);
  alpha_cmd->add_option("--grid", grid, "Grid points")->check(CLI::Range(2, 100000000));

  auto* rev_cmd = app.add_subcommand("revivals", "Times where |alpha| returns above a threshold");
  rev_cmd->add_option("--env", env_spec, "Environment state: index, +, haar");
  rev_cmd->add_option("--threshold", threshold, "Threshold on |alpha|");
  rev_cmd->add_option("--t-min", t_min, "Window start");
  rev_cmd->add_option("--t-max", t_max, "Window end");
  rev_cmd->add_option("--grid", grid, "Grid points")->check(CLI::Range(2, 100000000));

  auto* exact_cmd = app.add_subcommand("exact-fi", "Exact classical FI of N prepare-and-measure rounds");
  auto* mc_cmd = app.add_subcommand("mc-fi", "Monte Carlo classical FI of N prepare-and-measure rounds");
  for (auto* c : {exact_cmd, mc_cmd}) {
    c->add_option("--rounds", rounds, "Round counts N (repeat or comma-separate)")->required()->delimiter(',');
    c->add_option("--dwell", dwell, "Dwell time per round")->check(CLI::PositiveNumber);
    c->add_option("--env", env_spec, "Environment state: index, +, mixed, haar");
    c->add_flag("--qec", qec, "Codeword protocol under continuous correction");
  }

  auto* heis_cmd = app.add_subcommand("heisenberg", "FI curves of the Heisenberg-interaction model");
  heis_cmd->add_option("--n-max", n_max, "Largest round count")->check(CLI::Range(2, 100000));
  heis_cmd->add_option("--states", states, "Haar environment states")->check(CLI::PositiveNumber);
  heis_cmd->add_option("--exact-max", exact_max, "Exact cross-check up to this N")->check(CLI::Range(0, 16));
  heis_cmd->add_option("--gamma", gamma, "Coupling strength");
  heis_cmd->add_option("--dwell", dwell, "Dwell time per round")->check(CLI::PositiveNumber);
  heis_cmd->add_flag("--env-signal", env_signal, "Use H_E = Z");

  auto* rand_cmd = app.add_subcommand("random-models", "FI slopes of random master equations");
  rand_cmd->add_option("--count", count, "Number of models")->check(CLI::PositiveNumber);
  rand_cmd->add_option("--n-max", n_max, "Largest round count")->check(CLI::Range(2, 100000));
  rand_cmd->add_option("--jumps", jumps, "Ginibre jump operators")->check(CLI::NonNegativeNumber);
  rand_cmd->add_option("--dwell", rm_dwell, "Dwell time per round")->check(CLI::PositiveNumber);
  rand_cmd->add_flag("--env-signal", env_signal, "Use H_E = Z");

  auto* deph_cmd = app.add_subcommand("dephasing", "Two-qubit dephasing QFI report");
  deph_cmd->add_option("--time", time, "Probe dwell time (default pi/2)");
  deph_cmd->add_option("--probes", probes, "Number of probes")->check(CLI::PositiveNumber);
  time = std::numbers::pi / 2;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Output out(g);
    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    for (const CLI::Option* o : sub->get_options())
      if (o->count() > 0 && o->get_name() != "--help") run.options[o->get_name()] = o->results();

    if (sub == classify_cmd) {
      const Classification c = classify(run.load_model(), g.tolerance);
      out.document(classification_json(c));
    } else if (sub == code_cmd) {
      out.document(code_json(plan_code(run.load_model(), g.tolerance)));
    } else if (sub == kl_cmd) {
      const CodePlan plan = plan_code(run.load_model(), g.tolerance);
      const KlReport kl = kl_check(plan.code.projector, plan.errors, g.tolerance);
      ojson d = code_json(plan);
      d["kl_satisfied"] = kl.satisfied;
      d["kl_max_residual"] = kl.max_residual;
      d["error_count"] = plan.errors.size();
      out.document(d);
    } else if (sub == qfi_cmd) {
      const HmmModel& m = run.load_model();
      ComplexVector phi;
      const bool need_pure = protocol != "free";
      const ComplexMatrix env = parse_env(env_spec, m.d_e, g.seed, need_pure ? &phi : nullptr);
      for (double t : times) {
        if (!(t >= 0.0)) throw InputError("--time values must be non-negative");
        StatePair s;
        int rest = 0;
        if (protocol == "free") {
          const ComplexVector plus = ComplexVector::Ones(m.d_p) / std::sqrt(static_cast<double>(m.d_p));
          s = propagate(m.with_auxiliary(1), product_state(env, numkit::ket_bra(plus, plus)), t);
          rest = m.d_p;
        } else {
          const CodePlan plan = plan_code(m, g.tolerance);
          const StatePair in = logical_plus_state(plan.code, phi);
          if (protocol == "zeno") {
            if (steps < 1) throw InputError("--protocol zeno needs --steps >= 1");
            s = zeno_project_evolution(m, plan.code, in, t, steps, plan.recovery);
          } else {
            s = projected_generator_evolution(m, plan.code, in, t, plan.recovery);
          }
          rest = plan.code.dim();
        }
        const double f = qfi_mixed(trace_out_environment(s.rho, m.d_e, rest),
                                   trace_out_environment(s.drho, m.d_e, rest));
        out.record({{"t", t}, {"qfi", f}, {"qfi_over_t2", t > 0 ? f / (t * t) : 0.0}});
      }
    } else if (sub == alpha_cmd || sub == rev_cmd) {
      const HmmModel& m = run.load_model();
      ComplexVector phi;
      parse_env(env_spec, m.d_e, g.seed, &phi);
      const CodePlan plan = plan_code(m, g.tolerance);
      if (plan.kind != "unitary") throw InputError("alpha requires a unitary model with H_E = 0");
      const EnvelopeSeries series = envelope_alpha(m, plan.code, phi);
      if (sub == alpha_cmd) {
        for (int i = 0; i < grid; ++i) {
          const double t = t_max * i / (grid - 1);
          const Complex a = series.alpha(t);
          out.record({{"t", t}, {"alpha_re", a.real()}, {"alpha_im", a.imag()},
                      {"abs_alpha", std::abs(a)},
                      {"qfi", qfi_envelope(series, plan.code.delta_lambda(), t)}});
        }
      } else {
        const std::vector<double> hits = find_revivals(series, threshold, t_min, t_max, grid);
        for (double t : hits) out.record({{"t", t}, {"abs_alpha", series.abs_alpha(t)}});
        run.summary["revivals"] = hits.size();
      }
    } else if (sub == exact_cmd || sub == mc_cmd) {
      const HmmModel& m = run.load_model();
      const ComplexMatrix env = parse_env(env_spec, m.d_e, g.seed, nullptr);
      Protocol p = make_protocol(m, env, dwell, qec, g);
      if (sub == exact_cmd) {
        for (int n : rounds) {
          if (n < 1) throw InputError("--rounds values must be at least 1");
          p.cfg.rounds = n;
          out.record({{"N", n}, {"fi", exact_fi(p.kernel, p.cfg)}});
        }
      } else {
        if (g.samples < 1) throw InputError("mc-fi needs --samples >= 1");
        for (const auto& [n, est] : fi_curve(p.kernel, p.cfg, rounds))
          out.record({{"N", n}, {"fi", est.value}, {"variance_bound", est.variance_bound},
                      {"samples", est.samples_used}, {"aborted", est.aborted}, {"seed", g.seed}});
      }
    } else if (sub == heis_cmd) {
      HeisenbergConfig hc;
      hc.seed = g.seed;
      hc.n_max = n_max;
      hc.samples = g.samples;
      hc.env_signal = env_signal;
      hc.gamma = gamma;
      hc.dwell = dwell;
      hc.states = states;
      hc.exact_max = exact_max;
      hc.workers = g.workers;
      const HeisenbergReport rep = run_heisenberg(hc);
      for (const FiPoint& p : rep.points) {
        ojson r = {{"state", p.state}, {"N", p.n}, {"fi", p.fi}, {"variance_bound", p.variance_bound},
                   {"samples", p.samples}, {"aborted", p.aborted}};
        r["exact"] = p.exact >= 0 ? ojson(p.exact) : ojson(nullptr);
        out.record(r);
      }
      ojson fits = ojson::array();
      for (const StateFit& f : rep.fits) {
        ojson j = regression_json(f.fit);
        j["state"] = f.state;
        j["env_state"] = vector_json(rep.env_states[f.state]);
        fits.push_back(j);
      }
      run.summary["fits"] = fits;
    } else if (sub == rand_cmd) {
      RandomModelsConfig rc;
      rc.seed = g.seed;
      rc.count = count;
      rc.n_max = n_max;
      rc.samples = g.samples;
      rc.env_signal = env_signal;
      rc.dwell = rm_dwell;
      rc.jumps = jumps;
      rc.workers = g.workers;
      const RandomModelsReport rep = run_random_models(rc);
      for (const RandomModelRow& r : rep.rows)
        out.record({{"index", r.index}, {"slope", r.fit.slope}, {"intercept", r.fit.intercept},
                    {"r_c", r.fit.pearson_r}, {"fi_nmax", r.fi_max}, {"aborted", r.aborted},
                    {"error", r.error}});
      run.summary = {{"slope", quantiles_json(rep.slope)}, {"r_c", quantiles_json(rep.pearson_r)},
                     {"failures", rep.failures}};
    } else if (sub == deph_cmd) {
      const DephasingReport r = run_dephasing(time, probes);
      out.record({{"t", r.t}, {"per_probe_qfi", r.per_probe}, {"closed_form", r.closed_form},
                  {"residual", r.residual}, {"probes", r.n}, {"total_qfi", r.total}});
    }
    if (!run.summary.empty() && !g.out.empty()) std::cerr << run.summary.dump(2) << "\n";
    run.write_manifest();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFault& e) {
    std::cerr << "numerical fault: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
