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


#include "hmmqec/experiments.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/metrology.hpp"
#include "hmmqec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hmmqec {

using nlohmann::json;
using numkit::identity;
using numkit::kron;
using numkit::pauli_x;
using numkit::pauli_y;
using numkit::pauli_z;

namespace {

ComplexMatrix zero(int n) { return ComplexMatrix::Zero(n, n); }

std::string location(const std::string& field, std::size_t row, std::size_t col) {
  std::ostringstream os;
  os << field << "[" << row << "][" << col << "]";
  return os.str();
}

int read_dim(const json& dims, const char* key, int fallback) {
  if (!dims.contains(key)) {
    if (fallback > 0) return fallback;
    throw InputError(std::string("model file: dims.") + key + " is required");
  }
  if (!dims[key].is_number_integer() || dims[key].get<long>() < 1)
    throw InputError(std::string("model file: dims.") + key + " must be a positive integer");
  return dims[key].get<int>();
}

void require_shape(const ComplexMatrix& m, int n, const std::string& field) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << "model file: " << field << " is " << m.rows() << "x" << m.cols() << ", expected " << n
       << "x" << n;
    throw InputError(os.str());
  }
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("model file: " + field + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) {
      std::ostringstream os;
      os << "model file: " << field << "[" << r << "] is not an array";
      throw InputError(os.str());
    }
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols || cols == 0) {
      std::ostringstream os;
      os << "model file: " << field << "[" << r << "] has " << j[r].size() << " entries, expected "
         << cols;
      throw InputError(os.str());
    }
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
        continue;
      }
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InputError("model file: " + location(field, r, c) + " must be a number or [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag()))
        throw InputError("model file: " + location(field, r, c) + " is not finite");
    }
  return m;
}

json model_to_json(const HmmModel& model) {
  json j;
  j["dims"] = {{"d_E", model.d_e}, {"d_P", model.d_p}, {"d_A", model.d_a}};
  j["omega"] = model.omega;
  j["H_EP"] = matrix_to_json(model.h_ep);
  j["G"] = matrix_to_json(model.g);
  j["H_E"] = matrix_to_json(model.h_e);
  j["jumps"] = json::array();
  for (const auto& l : model.jumps) j["jumps"].push_back(matrix_to_json(l));
  return j;
}

HmmModel model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model file: top level must be an object");
  double omega = 0.0;
  if (j.contains("omega")) {
    if (!j["omega"].is_number()) throw InputError("model file: omega must be a number");
    omega = j["omega"].get<double>();
  }
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw InputError("model file: preset must be a string");
    for (const auto& [key, value] : j.items())
      if (key != "preset" && key != "omega")
        throw InputError("model file: preset files accept only \"omega\" besides \"preset\", got \"" + key + "\"");
    return preset_model(j["preset"].get<std::string>()).with_omega(omega);
  }
  if (!j.contains("dims") || !j["dims"].is_object()) throw InputError("model file: dims object is required");
  const json& dims = j["dims"];
  const int d_e = read_dim(dims, "d_E", 0);
  const int d_p = read_dim(dims, "d_P", 0);
  const int d_a = read_dim(dims, "d_A", 1);
  for (const char* key : {"H_EP", "G"})
    if (!j.contains(key)) throw InputError(std::string("model file: ") + key + " is required");
  const ComplexMatrix h_ep = matrix_from_json(j["H_EP"], "H_EP");
  const ComplexMatrix g = matrix_from_json(j["G"], "G");
  const ComplexMatrix h_e = j.contains("H_E") ? matrix_from_json(j["H_E"], "H_E") : zero(d_e);
  require_shape(h_ep, d_e * d_p, "H_EP");
  require_shape(g, d_p, "G");
  require_shape(h_e, d_e, "H_E");
  std::vector<ComplexMatrix> jumps;
  if (j.contains("jumps")) {
    if (!j["jumps"].is_array()) throw InputError("model file: jumps must be an array");
    for (std::size_t k = 0; k < j["jumps"].size(); ++k) {
      const std::string field = "jumps[" + std::to_string(k) + "]";
      jumps.push_back(matrix_from_json(j["jumps"][k], field));
      require_shape(jumps.back(), d_e * d_p, field);
    }
  }
  HmmModel m = make_model(d_e, d_p, h_ep, g, h_e, jumps, omega);
  return d_a > 1 ? m.with_auxiliary(d_a) : m;
}

HmmModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

ComplexMatrix spin1_sz() {
  ComplexMatrix s = zero(3);
  s(0, 0) = 1.0;
  s(2, 2) = -1.0;
  return s;
}

ComplexMatrix spin1_sx() {
  ComplexMatrix s = zero(3);
  s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = 1.0 / std::sqrt(2.0);
  return s;
}

HmmModel spin1_model(double tau, double delta) {
  // Delta S_z^2 is an environment Hamiltonian, not an environment signal, so
  // it lives in the coupling term.
  const ComplexMatrix h = tau * (kron(spin1_sz(), pauli_z()) + kron(spin1_sx(), pauli_x())) +
                          delta * kron(spin1_sz() * spin1_sz(), identity(2));
  return make_model(3, 2, h, pauli_z(), zero(3), {});
}

HmmModel heisenberg_model(double gamma, bool env_signal, double omega) {
  const ComplexMatrix h = gamma * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                                   kron(pauli_z(), pauli_z()));
  return make_model(2, 2, h, pauli_z(), env_signal ? ComplexMatrix(pauli_z()) : zero(2),
                    {kron(identity(2), pauli_z())}, omega);
}

std::vector<std::string> preset_names() {
  return {"heisenberg", "heisenberg-he", "dephasing-2q", "example-3e", "spin1-example"};
}

HmmModel preset_model(const std::string& name) {
  if (name == "heisenberg") return heisenberg_model(1.0, false);
  if (name == "heisenberg-he") return heisenberg_model(1.0, true);
  if (name == "dephasing-2q")
    return make_model(2, 2, kron(pauli_z(), pauli_z()), pauli_z(), zero(2),
                      {kron(identity(2), pauli_z())});
  if (name == "example-3e") {
    const ComplexMatrix p0 = numkit::ket_bra(numkit::basis_vector(2, 0), numkit::basis_vector(2, 0));
    const ComplexMatrix p1 = numkit::ket_bra(numkit::basis_vector(2, 1), numkit::basis_vector(2, 1));
    return make_model(2, 2, zero(4), pauli_z(), zero(2), {kron(p0, identity(2)), kron(p1, pauli_z())});
  }
  if (name == "spin1-example") return spin1_model(0.5, 1.0);
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown preset \"" + name + "\" (known: " + known + ")");
}

CodePlan plan_code(const HmmModel& model, double tol) {
  CodePlan plan;
  plan.classification = classify(model, tol);
  const Classification& c = plan.classification;
  plan.env_basis = identity(model.d_e);
  switch (c.regime) {
    case Regime::kHeisenberg:
      plan.kind = "hnes";
      plan.signal = project(model.g, build_extended_span(model, plan.env_basis), tol);
      break;
    case Regime::kEnvelopeLindblad:
      plan.kind = "hnels";
      plan.env_basis = is_diagonal_interaction(model).env_basis;
      plan.signal = project(model.g, build_diagonal_span(model, plan.env_basis), tol);
      break;
    case Regime::kEnvelopeUnitary:
      plan.kind = "unitary";
      plan.signal = project(model.g, orthonormalize(model.d_p, {identity(model.d_p)}, {"1"}), tol);
      break;
    default:
      throw InputError("no code construction for regime " + regime_label(c.regime));
  }
  plan.code = build_code_from_gperp(plan.signal.orthogonal, model.g);
  plan.errors = lindblad_errors(model, plan.env_basis, plan.code.d_a);
  if (plan.kind == "hnes") plan.recovery = recovery_channel(plan.code.projector, plan.errors);
  if (plan.kind == "hnels") plan.recovery = dephasing_recovery(plan.code);
  return plan;
}

RegressionResult linregress(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("linregress: x and y differ in length");
  if (x.size() < 2) throw InputError("linregress: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InputError("linregress: non-finite data");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("linregress: x values are all equal");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy > 0.0) {
    r.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  } else {
    r.degenerate = true;
  }
  return r;
}

HeisenbergReport run_heisenberg(const HeisenbergConfig& cfg) {
  if (cfg.n_max < 2) throw InputError("heisenberg: n_max must be at least 2");
  if (cfg.states < 1) throw InputError("heisenberg: states must be at least 1");
  if (cfg.samples < 0) throw InputError("heisenberg: samples must be non-negative");
  HeisenbergReport rep;
  rep.config = cfg;
  const HmmModel model = heisenberg_model(cfg.gamma, cfg.env_signal, cfg.omega);
  RngStream state_rng(cfg.seed, 1);
  for (int s = 0; s < cfg.states; ++s) rep.env_states.push_back(numkit::haar_state(2, state_rng));

  const bool exact_only = cfg.samples == 0;
  const int n_top = exact_only ? std::min(cfg.n_max, cfg.exact_max) : cfg.n_max;
  for (int s = 0; s < cfg.states; ++s) {
    const ComplexVector& phi = rep.env_states[s];
    ProtocolConfig pc = default_protocol(numkit::ket_bra(phi, phi), cfg.dwell, 1,
                                         std::max<long>(cfg.samples, 1), cfg.seed);
    pc.stream = RngStream(cfg.seed, 2).split(static_cast<std::uint64_t>(s)).stream();
    pc.workers = cfg.workers;
    const RoundKernel kernel = make_round_kernel(model, pc);
    std::vector<double> xs, ys;
    std::vector<int> ns;
    for (int n = 1; n <= n_top; ++n) ns.push_back(n);
    std::vector<std::pair<int, FiEstimate>> mc;
    if (!exact_only) mc = fi_curve(kernel, pc, ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      FiPoint p;
      p.state = s;
      p.n = ns[i];
      if (ns[i] <= cfg.exact_max) {
        ProtocolConfig ec = pc;
        ec.rounds = ns[i];
        p.exact = exact_fi(kernel, ec);
      }
      if (exact_only) {
        p.fi = p.exact;
      } else {
        p.fi = mc[i].second.value;
        p.variance_bound = mc[i].second.variance_bound;
        p.samples = mc[i].second.samples_used;
        p.aborted = mc[i].second.aborted;
      }
      xs.push_back(p.n);
      ys.push_back(p.fi);
      rep.points.push_back(p);
    }
    rep.fits.push_back({s, linregress(xs, ys)});
  }
  return rep;
}

RandomModelInstance random_model(std::uint64_t seed, int index, int jumps, bool env_signal) {
  if (jumps < 0) throw InputError("random_model: jump count must be non-negative");
  RngStream rng = RngStream(seed, 3).split(static_cast<std::uint64_t>(index));
  const ComplexMatrix a = numkit::ginibre(4, 4, rng);
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  std::vector<ComplexMatrix> ls;
  for (int k = 0; k < jumps; ++k) ls.push_back(numkit::ginibre(4, 4, rng));
  const ComplexVector phi = numkit::haar_state(2, rng);
  RandomModelInstance inst{make_model(2, 2, h, pauli_z(), env_signal ? ComplexMatrix(pauli_z()) : zero(2), ls),
                           numkit::ket_bra(phi, phi)};
  return inst;
}

Quantiles quantiles(std::vector<double> v) {
  Quantiles q;
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double f) {
    const double pos = f * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  q.min = v.front();
  q.q25 = at(0.25);
  q.median = at(0.5);
  q.q75 = at(0.75);
  q.max = v.back();
  return q;
}

RandomModelsReport run_random_models(const RandomModelsConfig& cfg) {
  if (cfg.count < 1) throw InputError("random-models: count must be at least 1");
  if (cfg.n_max < 2) throw InputError("random-models: n_max must be at least 2");
  if (cfg.samples < 1) throw InputError("random-models: samples must be at least 1");
  RandomModelsReport rep;
  rep.config = cfg;
  std::vector<int> ns;
  for (int n = 1; n <= cfg.n_max; ++n) ns.push_back(n);
  std::vector<double> slopes, rs;
  for (int i = 0; i < cfg.count; ++i) {
    RandomModelRow row;
    row.index = i;
    try {
      const RandomModelInstance inst = random_model(cfg.seed, i, cfg.jumps, cfg.env_signal);
      ProtocolConfig pc = default_protocol(inst.env_state, cfg.dwell, 1, cfg.samples, cfg.seed);
      pc.stream = RngStream(cfg.seed, 4).split(static_cast<std::uint64_t>(i)).stream();
      pc.workers = cfg.workers;
      const RoundKernel kernel = make_round_kernel(inst.model, pc);
      std::vector<double> xs, ys;
      for (const auto& [n, est] : fi_curve(kernel, pc, ns)) {
        xs.push_back(n);
        ys.push_back(est.value);
        row.aborted += est.aborted;
      }
      row.fit = linregress(xs, ys);
      row.fi_max = ys.back();
      slopes.push_back(row.fit.slope);
      rs.push_back(row.fit.pearson_r);
    } catch (const std::exception& e) {
      row.error = e.what();
      ++rep.failures;
    }
    rep.rows.push_back(row);
  }
  rep.slope = quantiles(slopes);
  rep.pearson_r = quantiles(rs);
  return rep;
}

DephasingReport run_dephasing(double t, int n) {
  if (!(t > 0.0)) throw InputError("dephasing: time must be positive");
  if (n < 1) throw InputError("dephasing: probe count must be at least 1");
  // Propagate the full environment-probe model from |0>_E |+>_P and trace
  // out the environment.
  const HmmModel model = preset_model("dephasing-2q");
  const ComplexVector plus = (numkit::basis_vector(2, 0) + numkit::basis_vector(2, 1)) / std::sqrt(2.0);
  const ComplexVector e0 = numkit::basis_vector(2, 0);
  const StatePair out =
      propagate(model, product_state(numkit::ket_bra(e0, e0), numkit::ket_bra(plus, plus)), t);
  DephasingReport r;
  r.t = t;
  r.per_probe = qfi_mixed(trace_out_environment(out.rho, 2, 2), trace_out_environment(out.drho, 2, 2));
  r.closed_form = 4.0 * t * t * std::exp(-4.0 * t);
  r.residual = std::abs(r.per_probe - r.closed_form);
  r.n = n;
  r.total = n * r.per_probe;
  return r;
}

}  // namespace hmmqec
