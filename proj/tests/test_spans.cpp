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
#include "hmmqec/spans.hpp"

#include <cmath>
#include <numbers>

using namespace hmmqec;
using namespace hmmqec::numkit;
using testutil::max_abs;

namespace {

ComplexMatrix zero(int n) { return ComplexMatrix::Zero(n, n); }
ComplexMatrix proj(int d, int i) { return ket_bra(basis_vector(d, i), basis_vector(d, i)); }
ComplexMatrix sigma_minus() {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

HmmModel example_3e() {
  return make_model(2, 2, zero(4), pauli_z(), zero(2),
                    {kron(proj(2, 0), identity(2)), kron(proj(2, 1), pauli_z())});
}

HmmModel dephasing_2q() {
  return make_model(2, 2, kron(pauli_z(), pauli_z()), pauli_z(), zero(2),
                    {kron(identity(2), pauli_z())});
}

HmmModel heisenberg() {
  const ComplexMatrix h =
      kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) + kron(pauli_z(), pauli_z());
  return make_model(2, 2, h, pauli_z(), zero(2), {kron(identity(2), pauli_z())});
}

HmmModel random_model(RngStream& rng, int d_e, int jumps) {
  const int ep = 2 * d_e;
  std::vector<ComplexMatrix> ls;
  for (int k = 0; k < jumps; ++k) ls.push_back(testutil::random_matrix(ep, ep, rng));
  return make_model(d_e, 2, testutil::random_hermitian(ep, rng), pauli_z(), zero(d_e), ls);
}

// Least-squares projection by the normal equations of the raw generators.
ComplexMatrix gram_projection(const std::vector<ComplexMatrix>& gens, const ComplexMatrix& op) {
  const int n = static_cast<int>(gens.size());
  ComplexMatrix gram(n, n);
  ComplexVector rhs(n);
  for (int a = 0; a < n; ++a) {
    rhs(a) = hs_inner(gens[a], op);
    for (int b = 0; b < n; ++b) gram(a, b) = hs_inner(gens[a], gens[b]);
  }
  const ComplexVector coef = gram.completeOrthogonalDecomposition().solve(rhs);
  ComplexMatrix out = ComplexMatrix::Zero(op.rows(), op.cols());
  for (int a = 0; a < n; ++a) out += coef(a) * gens[a];
  return out;
}

void check_orthonormal(const OperatorSpan& s) {
  for (int a = 0; a < s.size(); ++a)
    for (int b = 0; b < s.size(); ++b)
      CHECK(std::abs(hs_inner(s.basis[a], s.basis[b]) - (a == b ? 1.0 : 0.0)) < 1e-10);
}

}  // namespace

TEST_CASE("extended span: empty noise gives the identity only") {
  const HmmModel m = make_model(2, 2, zero(4), pauli_z(), zero(2), {});
  const OperatorSpan s = build_extended_span(m, identity(2));
  REQUIRE(s.size() == 1);
  CHECK(max_abs(s.basis[0] - identity(2) / std::numbers::sqrt2) < 1e-12);
  CHECK(s.generator_log.size() == 5);
}

TEST_CASE("extended span: fixtures") {
  const SpanVerdict v3e = project(pauli_z(), build_extended_span(example_3e(), identity(2)));
  CHECK(v3e.in_span);

  const HmmModel mx = make_model(2, 2, zero(4), pauli_z(), zero(2), {kron(identity(2), pauli_x())});
  const OperatorSpan s = build_extended_span(mx, identity(2));
  CHECK(s.size() == 2);
  CHECK(project(pauli_x(), s).in_span);
  const SpanVerdict v = project(pauli_z(), s);
  CHECK_FALSE(v.in_span);
  CHECK(v.residual_norm == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));

  ComplexMatrix not_unitary = identity(2);
  not_unitary(0, 0) = 2.0;
  CHECK_THROWS_AS(build_extended_span(mx, not_unitary), InputError);
}

TEST_CASE("diagonal span: fixtures and containment in the extended span") {
  const HmmModel bare = make_model(2, 2, zero(4), pauli_z(), zero(2), {});
  CHECK(build_diagonal_span(bare, identity(2)).size() == 1);
  CHECK(project(pauli_z(), build_diagonal_span(dephasing_2q(), identity(2))).in_span);

  RngStream rng(71, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const HmmModel m = random_model(rng, 2, 2);
    const ComplexMatrix u = testutil::random_unitary(2, rng);
    const OperatorSpan so = build_diagonal_span(m, u);
    const OperatorSpan s = build_extended_span(m, u);
    check_orthonormal(so);
    for (const auto& b : so.basis) CHECK(project(b, s).residual_norm < 1e-9);
  }
}

TEST_CASE("full-system span: fixtures and Gram-projection oracle") {
  const HmmModel bare = make_model(2, 2, zero(4), pauli_z(), zero(2), {});
  CHECK(build_full_system_span(bare).size() == 1);

  const ComplexMatrix signal = kron(identity(2), pauli_z());
  CHECK(project(signal, build_full_system_span(dephasing_2q())).in_span);

  const SpanVerdict v = project(signal, build_full_system_span(example_3e()));
  CHECK_FALSE(v.in_span);
  const std::vector<ComplexMatrix> gens{identity(4), kron(proj(2, 0), identity(2)),
                                        kron(proj(2, 1), pauli_z()),
                                        kron(proj(2, 1), identity(2))};
  const ComplexMatrix oracle = gram_projection(gens, signal);
  CHECK(max_abs(v.parallel - oracle) < 1e-10);
  CHECK(v.residual_norm == doctest::Approx((signal - oracle).norm()).epsilon(1e-10));
  CHECK(v.residual_norm > 0.1);
}

TEST_CASE("project: fixtures, decomposition invariants, least-squares oracle") {
  const OperatorSpan ones = orthonormalize(2, {identity(2)}, {"1"});
  CHECK(project(identity(2), ones).residual_norm < 1e-14);
  const SpanVerdict z = project(pauli_z(), ones);
  CHECK(z.residual_norm == doctest::Approx(std::numbers::sqrt2));
  CHECK(max_abs(z.orthogonal - pauli_z()) < 1e-14);

  RngStream rng(73, 0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<ComplexMatrix> gens;
    for (int k = 0; k < 4; ++k) gens.push_back(testutil::random_matrix(3, 3, rng));
    gens.push_back(gens[0] + 2.0 * gens[1]);  // dependent generator
    const OperatorSpan s = orthonormalize(3, gens, std::vector<std::string>(5, "g"));
    CHECK(s.size() == 4);
    check_orthonormal(s);
    for (const auto& g : gens) CHECK(project(g, s).residual_norm < 1e-9 * g.norm());
    const ComplexMatrix op = testutil::random_matrix(3, 3, rng);
    const SpanVerdict v = project(op, s);
    CHECK(max_abs(v.parallel + v.orthogonal - op) < 1e-10);
    for (const auto& b : s.basis) CHECK(std::abs(hs_inner(b, v.orthogonal)) < 1e-9);
    CHECK(max_abs(v.parallel - gram_projection(gens, op)) < 1e-9);
  }
  CHECK_THROWS_AS(project(identity(3), ones), InputError);
}

TEST_CASE("orthonormalize is rank revealing") {
  RngStream rng(79, 0);
  const ComplexMatrix a = testutil::random_matrix(2, 2, rng);
  const ComplexMatrix b = testutil::random_matrix(2, 2, rng);
  const std::vector<ComplexMatrix> gens{a, b, a - b, 1e-12 * testutil::random_matrix(2, 2, rng)};
  const OperatorSpan s = orthonormalize(2, gens, std::vector<std::string>(4, "g"));
  CHECK(s.size() == 2);
}

TEST_CASE("is_diagonal_interaction: fixtures") {
  const DiagonalInteraction dq = is_diagonal_interaction(dephasing_2q());
  CHECK(dq.diagonal);
  CHECK(dq.max_offdiagonal < 1e-8);
  CHECK_FALSE(is_diagonal_interaction(heisenberg()).diagonal);
  CHECK(is_diagonal_interaction(make_model(1, 2, pauli_x(), pauli_z(), zero(1), {})).diagonal);
  CHECK(is_diagonal_interaction(example_3e()).diagonal);

  // H_E that does not commute with the block structure breaks it.
  HmmModel m = dephasing_2q();
  m.h_e = pauli_x();
  CHECK_FALSE(is_diagonal_interaction(m).diagonal);
}

TEST_CASE("is_diagonal_interaction: finds a hidden rotated basis") {
  RngStream rng(83, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 3;
    const ComplexMatrix u = testutil::random_unitary(d, rng);
    const ComplexMatrix uu = kron(u, identity(2));
    ComplexMatrix h = ComplexMatrix::Zero(2 * d, 2 * d);
    ComplexMatrix l = ComplexMatrix::Zero(2 * d, 2 * d);
    ComplexMatrix he = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      h += kron(proj(d, i), testutil::random_hermitian(2, rng));
      l += kron(proj(d, i), testutil::random_matrix(2, 2, rng));
      he(i, i) = rng.normal();
    }
    const HmmModel m = make_model(d, 2, uu * h * uu.adjoint(), pauli_z(), u * he * u.adjoint(),
                                  {uu * l * uu.adjoint()});
    const DiagonalInteraction di = is_diagonal_interaction(m);
    REQUIRE(di.diagonal);
    CHECK(di.max_offdiagonal < 1e-8);
    CHECK(max_abs(di.env_basis.adjoint() * di.env_basis - identity(d)) < 1e-10);
  }
}

TEST_CASE("is_diagonal_interaction: degenerate blocks are not enough") {
  // Identical blocks on a two-dimensional environment sector leave the
  // commutant non-abelian: any basis works, so it is still diagonal.
  const ComplexMatrix h = kron(identity(2), pauli_x());
  CHECK(is_diagonal_interaction(make_model(2, 2, h, pauli_z(), zero(2), {})).diagonal);
  // Swap-type couplings cannot be block diagonalized.
  const ComplexMatrix swap_like = kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y());
  CHECK_FALSE(is_diagonal_interaction(make_model(2, 2, swap_like, pauli_z(), zero(2), {})).diagonal);
}

TEST_CASE("classify: fixtures") {
  CHECK(classify(example_3e()).regime == Regime::kIndeterminate);
  CHECK(classify(dephasing_2q()).regime == Regime::kSqlBound);
  CHECK(classify(make_model(1, 2, zero(2), pauli_z(), zero(1), {sigma_minus()})).regime ==
        Regime::kSqlBound);
  CHECK(classify(make_model(2, 2, zero(4), pauli_z(), zero(2), {kron(identity(2), pauli_x())}))
            .regime == Regime::kHeisenberg);
  const HmmModel unitary = make_model(2, 2, 0.7 * kron(pauli_z(), pauli_z()), pauli_z(), zero(2), {});
  const Classification c = classify(unitary);
  CHECK(c.regime == Regime::kEnvelopeUnitary);
  CHECK(c.unitary);
  CHECK(regime_label(Regime::kHeisenberg) == "HNES->HL");
  CHECK(regime_label(Regime::kIndeterminate) == "indeterminate");
}

TEST_CASE("classify: diagonal model outside the diagonal span gets the envelope verdict") {
  // H_EP blocks put Z in the extended span, but the diagonal span only sees
  // the jump blocks {X, 1}.
  const HmmModel m = make_model(2, 2, kron(pauli_z(), pauli_z()), pauli_z(), zero(2),
                                {kron(proj(2, 0), pauli_x())});
  const Classification c = classify(m);
  CHECK(c.diagonal);
  CHECK(c.hnels_residual > 0.1);
  CHECK(c.regime == Regime::kEnvelopeLindblad);
}

TEST_CASE("signal in the full-system span implies G in the extended span") {
  RngStream rng(89, 0);
  for (int trial = 0; trial < 10; ++trial) {
    HmmModel m = random_model(rng, 2, 1);
    const ComplexMatrix he = kron(testutil::random_hermitian(2, rng), identity(2));
    m.jumps.push_back(kron(identity(2), pauli_z()) + 0.3 * he);
    m.jumps.push_back(he);
    m.validate();
    const ComplexMatrix signal = kron(identity(2), m.g);
    REQUIRE(project(signal, build_full_system_span(m)).in_span);
    CHECK(project(m.g, build_extended_span(m, testutil::random_unitary(2, rng))).in_span);
  }
}

TEST_CASE("span verdicts are invariant under environment rotations") {
  RngStream rng(97, 0);
  const std::vector<HmmModel> models{example_3e(), dephasing_2q(), heisenberg(),
                                     make_model(2, 2, zero(4), pauli_z(), zero(2),
                                                {kron(identity(2), pauli_x())})};
  for (const auto& m : models) {
    const ComplexMatrix u = testutil::random_unitary(2, rng);
    const ComplexMatrix uu = kron(u, identity(2));
    HmmModel r = m;
    r.h_ep = uu * m.h_ep * uu.adjoint();
    for (auto& l : r.jumps) l = uu * l * uu.adjoint();
    r.validate();
    CHECK(project(m.g, build_extended_span(m, identity(2))).in_span ==
          project(r.g, build_extended_span(r, u)).in_span);
    CHECK(project(m.g, build_extended_span(m, identity(2))).in_span ==
          project(r.g, build_extended_span(r, testutil::random_unitary(2, rng))).in_span);
    CHECK(project(m.g, build_diagonal_span(m, identity(2))).in_span ==
          project(r.g, build_diagonal_span(r, u)).in_span);
    CHECK(classify(m).regime == classify(r).regime);
  }
}
