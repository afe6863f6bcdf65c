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


#ifndef HMMQEC_SPANS_HPP
#define HMMQEC_SPANS_HPP

#include "hmmqec/model.hpp"
#include "hmmqec/numkit.hpp"

#include <string>
#include <vector>

namespace hmmqec {

/// Default relative tolerance for span membership.
inline constexpr double kSpanTol = 1e-8;

/// Orthonormal operator subspace under the Hilbert-Schmidt inner product.
struct OperatorSpan {
  int ambient_dim = 0;
  std::vector<ComplexMatrix> basis;
  /// One label per generator fed to the orthonormalization, in order.
  std::vector<std::string> generator_log;

  int size() const { return static_cast<int>(basis.size()); }
};

struct SpanVerdict {
  bool in_span = false;
  double residual_norm = 0.0;
  ComplexMatrix parallel;
  ComplexMatrix orthogonal;
};

/// Orthonormalizes `generators` by SVD of their stacked vectorizations,
/// dropping singular values below `cutoff` times the largest.
OperatorSpan orthonormalize(int ambient_dim, const std::vector<ComplexMatrix>& generators,
                            std::vector<std::string> labels, double cutoff = 1e-9);

/// <bra| op |ket> for an operator on E(x)R, returned as an operator on R.
ComplexMatrix environment_block(const ComplexMatrix& op, int d_e, const ComplexVector& bra,
                                const ComplexVector& ket);

/// Throws InputError unless the columns of `env_basis` are an orthonormal
/// basis of C^d_e.
void require_env_basis(const ComplexMatrix& env_basis, int d_e);

/// Span of 1, <i|H_EP|m>, <i|L|m>, <i|L^dag|m> and <i|L_k^dag|m><n|L_j|l>.
OperatorSpan build_extended_span(const HmmModel& model, const ComplexMatrix& env_basis);
/// Diagonal-block restriction: 1, <i|L|i>, <i|L^dag|i>, <i|L_k^dag|i><m|L_j|m>.
OperatorSpan build_diagonal_span(const HmmModel& model, const ComplexMatrix& env_basis);
/// Span of 1, L_k, L_k^dag, L_k^dag L_j on E(x)P.
OperatorSpan build_full_system_span(const HmmModel& model);

/// Orthogonal decomposition of `op` against the span; in_span when the
/// residual is at most tol * max(1, |op|).
SpanVerdict project(const ComplexMatrix& op, const OperatorSpan& span, double tol = kSpanTol);

struct DiagonalInteraction {
  bool diagonal = false;
  /// Witnessing environment basis (columns); empty when not diagonal.
  ComplexMatrix env_basis;
  /// Largest off-diagonal environment block norm in the witnessing basis.
  double max_offdiagonal = 0.0;
};

/// Searches for an environment basis that diagonalizes H_E and
/// block-diagonalizes H_EP and every jump.
DiagonalInteraction is_diagonal_interaction(const HmmModel& model);

enum class Regime {
  kHeisenberg,         // G outside the extended span
  kSqlBound,           // signal inside the full-system span
  kEnvelopeLindblad,   // diagonal model, G outside the diagonal span
  kEnvelopeUnitary,    // no jumps, no environment signal
  kIndeterminate,
};

/// Stable textual label, e.g. "HNES->HL".
std::string regime_label(Regime r);

struct Classification {
  Regime regime = Regime::kIndeterminate;
  double hnes_residual = 0.0;
  double hnls_residual = 0.0;
  /// Negative when the model is not diagonal and the diagonal span is not built.
  double hnels_residual = -1.0;
  int extended_span_size = 0;
  int full_span_size = 0;
  int diagonal_span_size = 0;
  bool diagonal = false;
  bool unitary = false;
};

Classification classify(const HmmModel& model, double tol = kSpanTol);

}  // namespace hmmqec

#endif  // HMMQEC_SPANS_HPP
