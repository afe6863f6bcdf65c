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
#include "hmmqec/model.hpp"

#include <cmath>
#include <numbers>

using namespace hmmqec;
using namespace hmmqec::numkit;
using testutil::max_abs;

namespace {

ComplexMatrix zero(int n) { return ComplexMatrix::Zero(n, n); }

HmmModel random_model(RngStream& rng, int d_e, int jumps, double omega) {
  const int ep = 2 * d_e;
  std::vector<ComplexMatrix> ls;
  for (int k = 0; k < jumps; ++k) ls.push_back(0.5 * testutil::random_matrix(ep, ep, rng));
  return make_model(d_e, 2, testutil::random_hermitian(ep, rng), pauli_z(),
                    testutil::random_hermitian(d_e, rng), ls, omega);
}

StatePair random_product(RngStream& rng, int d_e, int d_pa) {
  return product_state(testutil::random_density(d_e, rng), testutil::random_density(d_pa, rng));
}

HmmModel dephasing_model() {
  // G = Z, H_EP = Z(x)Z, L = 1(x)Z on a qubit environment.
  return make_model(2, 2, kron(pauli_z(), pauli_z()), pauli_z(), zero(2),
                    {kron(identity(2), pauli_z())});
}

HmmModel heisenberg_model() {
  const ComplexMatrix h =
      kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) + kron(pauli_z(), pauli_z());
  return make_model(2, 2, h, pauli_z(), zero(2), {kron(identity(2), pauli_z())});
}

}  // namespace

TEST_CASE("model validation rejects malformed inputs") {
  CHECK_THROWS_AS(make_model(1, 2, zero(2), identity(2), zero(1), {}), InputError);
  CHECK_THROWS_AS(make_model(1, 2, zero(3), pauli_z(), zero(1), {}), InputError);
  ComplexMatrix bad = pauli_x();
  bad(0, 1) = kI;
  CHECK_THROWS_AS(make_model(1, 2, zero(2), bad, zero(1), {}), InputError);
  CHECK_THROWS_AS(make_model(1, 2, zero(2), pauli_z(), zero(1), {zero(3)}), InputError);
  CHECK_NOTHROW(make_model(1, 2, zero(2), pauli_z(), zero(1), {}));
}

TEST_CASE("build_liouvillian: null model gives the zero generator") {
  const HmmModel m = make_model(2, 2, zero(4), pauli_z(), zero(2), {}, 0.0);
  const Liouvillian l = build_liouvillian(m);
  CHECK(l.generator.rows() == 16);
  CHECK(max_abs(l.generator) == 0.0);
}

TEST_CASE("build_liouvillian: single-qubit dephasing coherence decays as exp(-2t)") {
  const HmmModel m = make_model(1, 2, zero(2), pauli_z(), zero(1), {pauli_z()}, 0.0);
  const ComplexVector plus = (basis_vector(2, 0) + basis_vector(2, 1)) / std::numbers::sqrt2;
  const StatePair s = product_state(identity(1), ket_bra(plus, plus));
  for (double t : {0.1, 0.5, 1.3}) {
    const StatePair out = propagate(m, s, t);
    CHECK(std::abs(out.rho(0, 1) - 0.5 * std::exp(-2.0 * t)) < 1e-12);
    CHECK(std::abs(out.rho(0, 0) - 0.5) < 1e-12);
  }
}

TEST_CASE("generator preserves Hermiticity and trace; superoperator matches direct action") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const HmmModel m = random_model(rng, 2, 2, 0.7);
    const Liouvillian l = build_liouvillian(m);
    const ComplexMatrix rho = testutil::random_density(4, rng);
    const ComplexMatrix image = unvec(l.generator * vec(rho), 4, 4);
    CHECK(max_abs(image - image.adjoint()) < 1e-12);
    CHECK(std::abs(image.trace()) < 1e-10);
    CHECK(max_abs(image - apply_generator(m, rho)) < 1e-12);
  }
}

TEST_CASE("d_omega generator matches central difference of the generator") {
  RngStream rng(37, 0);
  const HmmModel m = random_model(rng, 2, 2, 0.4);
  const double h = 1e-4;
  const ComplexMatrix fd =
      (build_liouvillian(m.with_omega(0.4 + h)).generator -
       build_liouvillian(m.with_omega(0.4 - h)).generator) / (2 * h);
  CHECK(max_abs(fd - build_liouvillian(m).d_omega_generator) < 1e-8);
  // Independent of omega.
  CHECK(max_abs(build_liouvillian(m.with_omega(-3.0)).d_omega_generator -
                build_liouvillian(m).d_omega_generator) == 0.0);
}

TEST_CASE("propagate: zero time and negative time") {
  RngStream rng(41, 0);
  const HmmModel m = random_model(rng, 2, 1, 0.3);
  const StatePair s = random_product(rng, 2, 2);
  const StatePair out = propagate(m, s, 0.0);
  CHECK(max_abs(out.rho - s.rho) < 1e-14);
  CHECK(max_abs(out.drho - s.drho) < 1e-14);
  CHECK_THROWS_AS(propagate(m, s, -0.1), InputError);
}

TEST_CASE("propagate: pure phase signal reaches 4 t^2 Var(Z)") {
  const HmmModel m = make_model(1, 2, zero(2), pauli_z(), zero(1), {}, 0.3);
  const ComplexVector plus = (basis_vector(2, 0) + basis_vector(2, 1)) / std::numbers::sqrt2;
  const StatePair s = product_state(identity(1), ket_bra(plus, plus));
  for (double t : {0.2, 1.0, 2.5}) {
    const StatePair out = propagate(m, s, t);
    // Pure states: QFI = 2 Tr(drho^2).
    const double qfi = 2.0 * (out.drho * out.drho).trace().real();
    CHECK(qfi == doctest::Approx(4.0 * t * t).epsilon(1e-10));
  }
}

TEST_CASE("propagate: sensitivity agrees with central finite differences") {
  RngStream rng(43, 0);
  for (int trial = 0; trial < 4; ++trial) {
    const double w = 0.5 * trial - 0.5;
    const HmmModel m = random_model(rng, 2, 2, w);
    const StatePair s = random_product(rng, 2, 2);
    const double t = 0.7;
    const double h = 1e-5;
    const ComplexMatrix fd =
        (propagate(m.with_omega(w + h), s, t).rho - propagate(m.with_omega(w - h), s, t).rho) /
        (2 * h);
    CHECK(max_abs(propagate(m, s, t).drho - fd) < 1e-6);
  }
}

TEST_CASE("propagate: semigroup, trace, Hermiticity and positivity") {
  RngStream rng(47, 0);
  const HmmModel m = random_model(rng, 2, 3, 0.9);
  StatePair s = random_product(rng, 2, 2);
  const StatePair two_step = propagate(m, propagate(m, s, 0.3), 0.45);
  const StatePair one_step = propagate(m, s, 0.75);
  CHECK(max_abs(two_step.rho - one_step.rho) < 1e-9);
  CHECK(max_abs(two_step.drho - one_step.drho) < 1e-9);
  for (int k = 0; k < 5; ++k) {
    s = propagate(m, s, 0.4);
    CHECK(std::abs(s.rho.trace() - 1.0) < 1e-9);
    CHECK(max_abs(s.rho - s.rho.adjoint()) < 1e-9);
    CHECK(herm_eig(s.rho).eigenvalues(0) >= -1e-9);
    CHECK_NOTHROW(validate_state_pair(s));
  }
}

TEST_CASE("first_order_step: identity at dt=0, traceless increment, O(dt^2) error") {
  RngStream rng(53, 0);
  const HmmModel m = random_model(rng, 2, 2, 0.2);
  const StatePair s = random_product(rng, 2, 2);
  CHECK(max_abs(first_order_step(m, s.rho, 0.0) - s.rho) == 0.0);
  CHECK(std::abs((first_order_step(m, s.rho, 0.01) - s.rho).trace()) < 1e-12);

  double ratios[3];
  int i = 0;
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    const ComplexMatrix exact = propagate(m, s, dt).rho;
    ratios[i++] = (first_order_step(m, s.rho, dt) - exact).norm() / (dt * dt);
  }
  // The second-order coefficient is 1/2 |L^2 rho|: the ratios settle.
  CHECK(ratios[1] == doctest::Approx(ratios[2]).epsilon(0.02));
  CHECK(ratios[0] < 2.0 * ratios[2]);
}

TEST_CASE("validate_state_pair rejects broken states") {
  StatePair s = product_state(identity(1), 0.5 * identity(2));
  CHECK_NOTHROW(validate_state_pair(s));
  s.rho(0, 0) = 0.7;
  CHECK_THROWS_AS(validate_state_pair(s), InputError);
  s = product_state(identity(1), 0.5 * identity(2));
  s.drho(0, 0) = 0.1;
  CHECK_THROWS_AS(validate_state_pair(s), InputError);
}

TEST_CASE("dephasing lemma: diagonal interactions") {
  const HmmModel m = dephasing_model();
  const ComplexMatrix basis = identity(2);
  RngStream rng(59, 0);
  const ComplexMatrix rho_p = testutil::random_density(2, rng);

  // Already diagonal environment.
  ComplexMatrix rho_e = ComplexMatrix::Zero(2, 2);
  rho_e(0, 0) = 0.3;
  rho_e(1, 1) = 0.7;
  CHECK(check_dephasing_lemma(m, basis, kron(rho_e, rho_p), 0.8) < 1e-12);

  const ComplexVector plus = (basis_vector(2, 0) + basis_vector(2, 1)) / std::numbers::sqrt2;
  CHECK(check_dephasing_lemma(m, basis, kron(ket_bra(plus, plus), rho_p), 0.8) < 1e-9);

  // The Heisenberg coupling is not diagonal; the lemma does not apply.
  const ComplexVector zero_p = basis_vector(2, 0);
  const double dev = check_dephasing_lemma(heisenberg_model(), basis,
                                           kron(ket_bra(plus, plus), ket_bra(zero_p, zero_p)), 0.8);
  CHECK(dev > 1e-3);
}

TEST_CASE("environment signal lemma: H_E drops out for diagonal interactions") {
  HmmModel m = dephasing_model();
  m.h_e = 0.8 * pauli_z();
  m.omega = 1.3;
  m.validate();
  RngStream rng(61, 0);
  ComplexMatrix rho_e = ComplexMatrix::Zero(2, 2);
  rho_e(0, 0) = 0.4;
  rho_e(1, 1) = 0.6;
  const ComplexMatrix rho = kron(rho_e, testutil::random_density(2, rng));
  CHECK(check_env_signal_lemma(m, rho, 1.1) < 1e-9);

  // Off-diagonal H_E does not commute with the interaction: it matters.
  m.h_e = 0.8 * pauli_x();
  CHECK(check_env_signal_lemma(m, rho, 1.1) > 1e-3);
}

TEST_CASE("auxiliary lifting acts as identity on A") {
  const HmmModel m = dephasing_model().with_auxiliary(2);
  CHECK(m.joint_dim() == 8);
  const Liouvillian l = build_liouvillian(m);
  CHECK(l.generator.rows() == 64);
  RngStream rng(67, 0);
  const ComplexMatrix rho_pa = testutil::random_density(4, rng);
  const StatePair out = propagate(m, product_state(0.5 * identity(2), rho_pa), 0.6);
  // Tracing P out leaves the auxiliary marginal untouched.
  const std::array<int, 3> dims{2, 2, 2};
  const std::array<int, 1> keep{2};
  const std::array<int, 2> dims_pa{2, 2};
  const std::array<int, 1> keep_a{1};
  CHECK(max_abs(partial_trace(out.rho, dims, keep) - partial_trace(rho_pa, dims_pa, keep_a)) <
        1e-12);
}
