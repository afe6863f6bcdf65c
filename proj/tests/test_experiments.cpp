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

#include "doctest.h"
#include "test_util.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/experiments.hpp"
#include "hmmqec/rng.hpp"
#include "hmmqec/spans.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace hmmqec;
using namespace hmmqec::numkit;
using nlohmann::json;

namespace {

std::string input_error_message(const json& j) {
  try {
    model_from_json(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

json hnes_model_json() {
  json j;
  j["dims"] = {{"d_E", 2}, {"d_P", 2}};
  j["H_EP"] = matrix_to_json(ComplexMatrix::Zero(4, 4));
  j["G"] = matrix_to_json(pauli_z());
  j["jumps"] = json::array({matrix_to_json(kron(identity(2), pauli_x()))});
  return j;
}

}  // namespace

TEST_CASE("model JSON: round trip and parse diagnostics") {
  RngStream rng(3, 0);
  const ComplexMatrix h = testutil::random_hermitian(6, rng);
  const HmmModel m = make_model(3, 2, h, pauli_y(), testutil::random_hermitian(3, rng),
                                {testutil::random_matrix(6, 6, rng)}, 0.125);
  const HmmModel back = model_from_json(json::parse(model_to_json(m).dump()));
  CHECK(back.d_e == 3);
  CHECK(back.d_p == 2);
  CHECK(back.omega == 0.125);
  CHECK(testutil::max_abs(back.h_ep - m.h_ep) == 0.0);
  CHECK(testutil::max_abs(back.jumps[0] - m.jumps[0]) == 0.0);

  json bad = hnes_model_json();
  bad["H_EP"][1][0] = "x";
  CHECK(input_error_message(bad).find("H_EP[1][0]") != std::string::npos);
  bad = hnes_model_json();
  bad["G"][1] = json::array({json::array({1, 0})});
  CHECK(input_error_message(bad).find("G[1]") != std::string::npos);
  bad = hnes_model_json();
  bad["G"] = matrix_to_json(identity(3));
  CHECK(input_error_message(bad).find("G is 3x3") != std::string::npos);
  bad = hnes_model_json();
  bad["dims"].erase("d_P");
  CHECK(input_error_message(bad).find("d_P") != std::string::npos);
  bad = hnes_model_json();
  bad["G"] = matrix_to_json(identity(2));
  CHECK_THROWS_AS(model_from_json(bad), InputError);

  json aux = hnes_model_json();
  aux["dims"]["d_A"] = 2;
  CHECK(model_from_json(aux).d_a == 2);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset_model(name).validate());
  CHECK_THROWS_AS(preset_model("nope"), InputError);
  const HmmModel p = model_from_json(json{{"preset", "dephasing-2q"}, {"omega", 0.5}});
  CHECK(p.omega == 0.5);
  CHECK_THROWS_AS(model_from_json(json{{"preset", "dephasing-2q"}, {"G", 1}}), InputError);

  CHECK(classify(preset_model("example-3e")).regime == Regime::kIndeterminate);
  CHECK(classify(preset_model("dephasing-2q")).regime == Regime::kSqlBound);
  CHECK(classify(model_from_json(hnes_model_json())).regime == Regime::kHeisenberg);

  const HmmModel s = preset_model("spin1-example");
  CHECK(s.d_e == 3);
  CHECK(std::abs((spin1_sx() * spin1_sx() + spin1_sz() * spin1_sz()).trace().real() - 4.0) < 1e-14);
  CHECK(testutil::max_abs(s.h_e) == 0.0);
  const ComplexMatrix block = environment_block(s.h_ep, 3, basis_vector(3, 0), basis_vector(3, 0));
  CHECK(testutil::max_abs(block - (identity(2) + 0.5 * pauli_z())) < 1e-15);
}

TEST_CASE("linregress") {
  const RegressionResult line = linregress({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(std::abs(line.slope - 2.0) < 1e-14);
  CHECK(std::abs(line.intercept - 1.0) < 1e-14);
  CHECK(std::abs(line.pearson_r - 1.0) < 1e-14);
  CHECK(!line.degenerate);

  const RegressionResult flat = linregress({1, 2, 3}, {4, 4, 4});
  CHECK(flat.slope == 0.0);
  CHECK(flat.pearson_r == 0.0);
  CHECK(flat.degenerate);
  CHECK_THROWS_AS(linregress({2, 2}, {1, 3}), InputError);
  CHECK_THROWS_AS(linregress({1}, {1}), InputError);

  // Normal equations (X^T X) beta = X^T y with design [1, x].
  RngStream rng(19, 0);
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(0.5 * i);
    y.push_back(-1.5 + 0.7 * x.back() + rng.normal());
  }
  Eigen::MatrixXd design(40, 2);
  Eigen::VectorXd yv(40);
  for (int i = 0; i < 40; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
    yv(i) = y[i];
  }
  const Eigen::Vector2d beta = (design.transpose() * design).ldlt().solve(design.transpose() * yv);
  const RegressionResult fit = linregress(x, y);
  CHECK(std::abs(fit.intercept - beta(0)) < 1e-12);
  CHECK(std::abs(fit.slope - beta(1)) < 1e-12);
  const Eigen::VectorXd xc = design.col(1).array() - design.col(1).mean();
  const Eigen::VectorXd yc = yv.array() - yv.mean();
  CHECK(std::abs(fit.pearson_r - xc.dot(yc) / (xc.norm() * yc.norm())) < 1e-12);
}

TEST_CASE("quantiles") {
  const Quantiles q = quantiles({5, 1, 3, 2, 4});
  CHECK(q.min == 1);
  CHECK(q.q25 == 2);
  CHECK(q.median == 3);
  CHECK(q.q75 == 4);
  CHECK(q.max == 5);
  CHECK(quantiles({1, 2}).median == 1.5);
}

TEST_CASE("dephasing report") {
  const double t = std::numbers::pi / 2;
  const DephasingReport r = run_dephasing(t, 10);
  const double want = std::exp(-2 * std::numbers::pi) * std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(r.per_probe - want) < 1e-10);
  CHECK(r.residual < 1e-10);
  CHECK(std::abs(r.total - 10 * r.per_probe) < 1e-15);
  CHECK_THROWS_AS(run_dephasing(0.0, 1), InputError);
}

TEST_CASE("heisenberg study: exact-only mode, determinism, Monte Carlo agreement") {
  HeisenbergConfig cfg;
  cfg.samples = 0;
  cfg.n_max = 6;
  cfg.states = 2;
  const HeisenbergReport exact = run_heisenberg(cfg);
  REQUIRE(exact.points.size() == 12);
  REQUIRE(exact.fits.size() == 2);
  for (const auto& p : exact.points) CHECK(p.fi == p.exact);
  for (const auto& f : exact.fits) CHECK(f.fit.slope > 0.0);

  cfg.samples = 4000;
  const HeisenbergReport mc = run_heisenberg(cfg);
  const HeisenbergReport again = run_heisenberg(cfg);
  int within = 0;
  for (std::size_t i = 0; i < mc.points.size(); ++i) {
    CHECK(mc.points[i].fi == again.points[i].fi);
    if (std::abs(mc.points[i].fi - mc.points[i].exact) <= 3 * std::sqrt(mc.points[i].variance_bound))
      ++within;
  }
  CHECK(within >= 11);

  cfg.env_signal = true;
  const HeisenbergReport he = run_heisenberg(cfg);
  for (int s = 0; s < 2; ++s)
    CHECK((he.env_states[s] - mc.env_states[s]).norm() == 0.0);
}

TEST_CASE("random models: reproducible draws and single-model runs") {
  const RandomModelInstance a = random_model(5, 3, 3, false);
  const RandomModelInstance b = random_model(5, 3, 3, true);
  CHECK(testutil::max_abs(a.model.h_ep - b.model.h_ep) == 0.0);
  CHECK(testutil::max_abs(a.model.h_ep - a.model.h_ep.adjoint()) < 1e-15);
  CHECK(a.model.jumps.size() == 3);
  CHECK(std::abs(a.env_state.trace().real() - 1.0) < 1e-12);
  CHECK(testutil::max_abs(b.model.h_e - pauli_z()) == 0.0);

  RandomModelsConfig cfg;
  cfg.count = 1;
  cfg.n_max = 4;
  cfg.samples = 300;
  const RandomModelsReport r1 = run_random_models(cfg);
  const RandomModelsReport r2 = run_random_models(cfg);
  REQUIRE(r1.rows.size() == 1);
  CHECK(r1.rows[0].error.empty());
  CHECK(r1.rows[0].fit.slope == r2.rows[0].fit.slope);
  CHECK(r1.failures == 0);
  cfg.count = 0;
  CHECK_THROWS_AS(run_random_models(cfg), InputError);
}

TEST_CASE("plan_code picks the construction for each regime") {
  const CodePlan hnes = plan_code(model_from_json(hnes_model_json()));
  CHECK(hnes.kind == "hnes");
  CHECK(!hnes.recovery.empty());
  CHECK(kl_check(hnes.code.projector, hnes.errors).satisfied);
  CHECK(std::abs(std::abs(hnes.code.delta_lambda()) - 2.0) < 1e-12);

  const CodePlan unitary =
      plan_code(make_model(2, 2, 0.7 * kron(pauli_z(), pauli_z()), pauli_z(), ComplexMatrix::Zero(2, 2), {}));
  CHECK(unitary.kind == "unitary");
  CHECK(unitary.recovery.empty());
  CHECK(unitary.code.d_a == 2);

  CHECK_THROWS_AS(plan_code(preset_model("dephasing-2q")), InputError);
  CHECK_THROWS_AS(plan_code(preset_model("example-3e")), InputError);
}
