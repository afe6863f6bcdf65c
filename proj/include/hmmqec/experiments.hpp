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


#ifndef HMMQEC_EXPERIMENTS_HPP
#define HMMQEC_EXPERIMENTS_HPP

#include "hmmqec/model.hpp"
#include "hmmqec/numkit.hpp"
#include "hmmqec/qec.hpp"
#include "hmmqec/spans.hpp"
#include "hmmqec/trajectory.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hmmqec {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Model files

/// Matrix as nested rows of [re, im] pairs.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
/// Parses nested [re, im] rows; errors name the field and the row/col.
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& field);

/// {"dims": {"d_E", "d_P", "d_A"}, "omega", "H_EP", "G", "H_E", "jumps": [...]}
/// or {"preset": name, "omega"?: w}.
nlohmann::json model_to_json(const HmmModel& model);
HmmModel model_from_json(const nlohmann::json& j);
HmmModel load_model_file(const std::string& path);

/// heisenberg, heisenberg-he, dephasing-2q, example-3e, spin1-example.
std::vector<std::string> preset_names();
HmmModel preset_model(const std::string& name);

/// Spin-1 operators in the S_z eigenbasis ordered (+1, 0, -1).
ComplexMatrix spin1_sz();
ComplexMatrix spin1_sx();
/// H_EP = tau (S_z (x) Z + S_x (x) X) + delta S_z^2 (x) 1, signal Z, no
/// environment signal.
HmmModel spin1_model(double tau, double delta);

// ---------------------------------------------------------------------------
// Code selection

/// Error-correction setup matched to a model's regime:
///   "hnes"    - G_perp against the extended span, KL recovery for {1, L_k};
///   "hnels"   - G_perp against the diagonal span, marker recovery;
///   "unitary" - traceless part of G, no recovery.
struct CodePlan {
  std::string kind;
  Classification classification;
  ComplexMatrix env_basis;
  SpanVerdict signal;          // G against the chosen span
  MetrologyCode code;
  ExtendedErrorSet errors;     // Lindblad-level extended errors in env_basis
  KrausList recovery;
};

/// Throws InputError for regimes without a code construction.
CodePlan plan_code(const HmmModel& model, double tol = kSpanTol);

// ---------------------------------------------------------------------------
// Regression

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
  /// Set when y has zero variance; pearson_r is then reported as 0.
  bool degenerate = false;
};

/// Ordinary least squares; throws InputError unless x has two distinct values.
RegressionResult linregress(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Heisenberg-interaction study

/// gamma (XX + YY + ZZ) coupling, signal Z, jump 1 (x) Z, H_E = 0 or Z.
HmmModel heisenberg_model(double gamma, bool env_signal, double omega = 0.0);

struct HeisenbergConfig {
  std::uint64_t seed = 1;
  int n_max = 40;
  long samples = 25000;  // 0: exact values only
  bool env_signal = false;
  double gamma = 1.0;
  double omega = 0.0;
  double dwell = 0.25;
  int states = 5;
  int exact_max = 15;
  int workers = 1;
};

struct FiPoint {
  int state = 0;
  int n = 0;
  double fi = 0.0;              // Monte Carlo value, or exact in exact-only mode
  double variance_bound = 0.0;
  long samples = 0;
  long aborted = 0;
  double exact = -1.0;          // < 0 when not computed
};

struct StateFit {
  int state = 0;
  RegressionResult fit;
};

struct HeisenbergReport {
  HeisenbergConfig config;
  std::vector<ComplexVector> env_states;
  std::vector<FiPoint> points;
  std::vector<StateFit> fits;
};

/// Haar environment states come from RngStream(seed, 1); state s samples
/// from stream RngStream(seed, 2).split(s). The same states are used for
/// either H_E.
HeisenbergReport run_heisenberg(const HeisenbergConfig& cfg);

// ---------------------------------------------------------------------------
// Random master equations

struct RandomModelsConfig {
  std::uint64_t seed = 1;
  int count = 50;
  int n_max = 30;
  long samples = 25000;
  bool env_signal = false;
  double dwell = 0.1;
  int jumps = 3;
  int workers = 1;
};

struct RandomModelInstance {
  HmmModel model;
  ComplexMatrix env_state;
};

/// Model `index`: H_EP = (A + A^dag)/2 and the jumps from Ginibre draws, and a
/// Haar environment state, all from RngStream(seed, 3).split(index); the
/// draw does not depend on env_signal.
RandomModelInstance random_model(std::uint64_t seed, int index, int jumps, bool env_signal);

struct RandomModelRow {
  int index = 0;
  RegressionResult fit;
  double fi_max = 0.0;   // FI at n_max
  long aborted = 0;
  std::string error;     // non-empty when the model failed
};

struct Quantiles {
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};
Quantiles quantiles(std::vector<double> values);

struct RandomModelsReport {
  RandomModelsConfig config;
  std::vector<RandomModelRow> rows;
  Quantiles slope;
  Quantiles pearson_r;
  int failures = 0;
};

RandomModelsReport run_random_models(const RandomModelsConfig& cfg);

// ---------------------------------------------------------------------------
// Two-qubit dephasing

struct DephasingReport {
  double t = 0.0;
  double per_probe = 0.0;     // QFI of the explicitly propagated probe state
  double closed_form = 0.0;   // 4 t^2 exp(-4t)
  double residual = 0.0;      // |per_probe - closed_form|
  int n = 0;
  double total = 0.0;         // n * per_probe
};

DephasingReport run_dephasing(double t, int n);

}  // namespace hmmqec

#endif  // HMMQEC_EXPERIMENTS_HPP
