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


#ifndef HMMQEC_QEC_HPP
#define HMMQEC_QEC_HPP

#include "hmmqec/model.hpp"
#include "hmmqec/numkit.hpp"

#include <vector>

namespace hmmqec {

/// Default Frobenius tolerance for the Knill-Laflamme conditions.
inline constexpr double kKlTol = 1e-8;

using KrausList = std::vector<ComplexMatrix>;

/// Two-codeword metrology code on P(x)A.
struct MetrologyCode {
  int d_p = 0;
  int d_a = 0;
  ComplexVector c0;
  ComplexVector c1;
  ComplexMatrix projector;  // |c0><c0| + |c1><c1|
  ComplexMatrix marker0;    // auxiliary support of c0, on A
  ComplexMatrix marker1;    // auxiliary support of c1, on A
  double lambda0 = 0.0;
  double lambda1 = 0.0;

  int dim() const { return d_p * d_a; }
  double delta_lambda() const { return lambda0 - lambda1; }
};

/// Purifies the positive and negative spectral parts of g_perp (normalized by
/// Tr|g_perp| / 2) onto orthogonal auxiliary supports, d_A = d_P. Zero
/// eigenvalues go to the positive part. The logical eigenvalues are taken
/// against `g`.
MetrologyCode build_code_from_gperp(const ComplexMatrix& g_perp, const ComplexMatrix& g);
inline MetrologyCode build_code_from_gperp(const ComplexMatrix& g_perp) {
  return build_code_from_gperp(g_perp, g_perp);
}

struct ExtendedError {
  ComplexMatrix op;
  int source = 0;  // index into the generating error list
  int bra = 0;     // environment bra index n
  int ket = 0;     // environment ket index k
};

struct ExtendedErrorSet {
  std::vector<ExtendedError> errors;

  std::vector<ComplexMatrix> operators() const;
  std::size_t size() const { return errors.size(); }
};

/// All environment blocks <n|E_i|k> of errors on E(x)R.
ExtendedErrorSet extended_errors(const std::vector<ComplexMatrix>& errors,
                                 const ComplexMatrix& env_basis);
/// First-order Lindblad errors {1, L_k} on E(x)P, lifted to E(x)P(x)A and
/// split into environment blocks.
ExtendedErrorSet lindblad_errors(const HmmModel& model, const ComplexMatrix& env_basis, int d_a);

/// Wraps plain errors (trivial environment).
ExtendedErrorSet plain_errors(const std::vector<ComplexMatrix>& errors);

struct KlReport {
  bool satisfied = false;
  double max_residual = 0.0;
  ComplexMatrix c;  // c_ab = Tr(P E_a^dag E_b P) / Tr P
};

/// Throws InputError unless p is a Hermitian idempotent within 1e-10.
void require_projector(const ComplexMatrix& p);

KlReport kl_check(const ComplexMatrix& projector, const ExtendedErrorSet& errs,
                  double tol = kKlTol);

/// Trace-preserving recovery for a correctable error set: syndrome isometries
/// from the diagonalized c-matrix, completed onto the codespace.
KrausList recovery_channel(const ComplexMatrix& projector, const ExtendedErrorSet& errs,
                           double tol = kKlTol);

/// Marker-measurement recovery: anything with auxiliary support in marker c
/// is reset to |C_c>.
KrausList dephasing_recovery(const MetrologyCode& code);

/// rho -> P rho P + R(P_perp rho P_perp) on E(x)P(x)A, as a superoperator.
/// An empty recovery keeps the projector-only form P.P + P_perp.P_perp.
ComplexMatrix correction_superop(const MetrologyCode& code, const KrausList& recovery, int d_e);

/// `steps` rounds of [evolve for t/steps; correct]. The model's auxiliary
/// dimension is set to the code's.
StatePair zeno_project_evolution(const HmmModel& model, const MetrologyCode& code,
                                 const StatePair& initial, double t, int steps,
                                 const KrausList& recovery);

/// Generator D o L o P (and its omega-derivative) of continuous correction
/// on E(x)P(x)A with the code's auxiliary dimension.
Liouvillian corrected_liouvillian(const HmmModel& model, const MetrologyCode& code,
                                  const KrausList& recovery);

/// The steps -> infinity limit: evolution under D o L o P with its exact
/// omega-derivative, applied to P(initial).
StatePair projected_generator_evolution(const HmmModel& model, const MetrologyCode& code,
                                        const StatePair& initial, double t,
                                        const KrausList& recovery);

/// Initial code state |env><env| (x) |+_L><+_L| with |+_L> = (c0 + c1)/sqrt2.
StatePair logical_plus_state(const MetrologyCode& code, const ComplexVector& env);

}  // namespace hmmqec

#endif  // HMMQEC_QEC_HPP
