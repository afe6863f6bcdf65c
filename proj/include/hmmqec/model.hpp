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

#ifndef HMMQEC_MODEL_HPP
#define HMMQEC_MODEL_HPP

#include "hmmqec/numkit.hpp"

#include <vector>

namespace hmmqec {

/// Joint environment-probe Lindblad model. The signal omega*(G + H_E) carries
/// the estimated parameter; H_EP and the jumps are parameter-independent noise.
/// Operators live on E (x) P; the auxiliary factor A is carried implicitly
/// with identity action.
struct HmmModel {
  int d_e = 1;
  int d_p = 2;
  int d_a = 1;
  ComplexMatrix h_ep;               // E(x)P, Hermitian
  ComplexMatrix g;                  // P, Hermitian signal generator
  ComplexMatrix h_e;                // E, Hermitian, may be zero
  std::vector<ComplexMatrix> jumps; // E(x)P
  double omega = 0.0;

  /// Throws InputError when an invariant fails: dimension mismatch,
  /// non-Hermitian H_EP/G/H_E, or G proportional to the identity.
  void validate() const;

  int joint_dim() const { return d_e * d_p * d_a; }
  int probe_aux_dim() const { return d_p * d_a; }

  /// Same model with a different auxiliary dimension.
  HmmModel with_auxiliary(int aux_dim) const;
  /// Same model with another omega.
  HmmModel with_omega(double w) const;
  bool has_jumps() const { return !jumps.empty(); }
  bool env_signal_is_zero(double tol = 1e-14) const;

  /// Lifts an E(x)P operator to E(x)P(x)A.
  ComplexMatrix lift_ep(const ComplexMatrix& op_ep) const;
  /// 1_E (x) G (x) 1_A + H_E (x) 1_P (x) 1_A.
  ComplexMatrix signal_joint() const;
  /// H_EP + omega * signal, lifted to E(x)P(x)A.
  ComplexMatrix total_hamiltonian() const;
};

/// Builds an HmmModel from its parts with d_a = 1 and validates it.
HmmModel make_model(int d_e, int d_p, ComplexMatrix h_ep, ComplexMatrix g, ComplexMatrix h_e,
                    std::vector<ComplexMatrix> jumps, double omega = 0.0);

/// Vectorized master-equation generator on E(x)P(x)A (column-major vec) and
/// its omega-derivative.
struct Liouvillian {
  int dim = 0;  // side of the density matrix
  ComplexMatrix generator;
  ComplexMatrix d_omega_generator;
};

/// Density matrix on E(x)P(x)A with its omega-derivative.
struct StatePair {
  ComplexMatrix rho;
  ComplexMatrix drho;
};

/// Superoperator of -i[H, .] in column-major vectorization.
ComplexMatrix commutator_superop(const ComplexMatrix& h);
/// Superoperator of L . L^dagger - 1/2 {L^dagger L, .}.
ComplexMatrix dissipator_superop(const ComplexMatrix& l);

Liouvillian build_liouvillian(const HmmModel& model);

/// exp(t * [[L, 0], [dL, L]]) split into its two nonzero blocks.
struct AugmentedPropagator {
  int dim = 0;
  ComplexMatrix map;    // exp(t L)
  ComplexMatrix dmap;   // d/domega exp(t L)

  StatePair apply(const StatePair& s) const;
};

AugmentedPropagator make_propagator(const Liouvillian& l, double t);

/// Advances (rho, d rho) by time t; the sensitivity is exact (no finite
/// differences).
StatePair propagate(const HmmModel& model, const StatePair& state, double t);

/// rho + dt * (master equation right-hand side).
ComplexMatrix first_order_step(const HmmModel& model, const ComplexMatrix& rho, double dt);

/// Applies the master-equation right-hand side once.
ComplexMatrix apply_generator(const HmmModel& model, const ComplexMatrix& rho);

/// Checks the StatePair invariants (PSD within 1e-9, unit trace, Hermitian
/// traceless derivative); throws InputError naming the first violation.
void validate_state_pair(const StatePair& s);

/// Completely dephasing channel on E in the basis given by the columns of
/// `env_basis`, identity on P(x)A.
ComplexMatrix dephase_environment(const ComplexMatrix& rho, const ComplexMatrix& env_basis,
                                  int rest_dim);

/// Tr_E of a joint E(x)(rest) operator.
ComplexMatrix trace_out_environment(const ComplexMatrix& m, int d_e, int rest_dim);

/// Frobenius distance between Tr_E Phi_t(rho) and Tr_E Phi_t(D_E(rho)).
double check_dephasing_lemma(const HmmModel& model, const ComplexMatrix& env_basis,
                             const ComplexMatrix& rho, double t);

/// Frobenius distance between Tr_E Phi_t(rho) with and without the
/// environment signal H_E.
double check_env_signal_lemma(const HmmModel& model, const ComplexMatrix& rho, double t);

/// Product state rho_E (x) rho_PA with zero derivative.
StatePair product_state(const ComplexMatrix& rho_e, const ComplexMatrix& rho_pa);

}  // namespace hmmqec

#endif  // HMMQEC_MODEL_HPP
