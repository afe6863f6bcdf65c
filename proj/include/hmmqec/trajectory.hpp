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


#ifndef HMMQEC_TRAJECTORY_HPP
#define HMMQEC_TRAJECTORY_HPP

#include "hmmqec/model.hpp"
#include "hmmqec/numkit.hpp"
#include "hmmqec/qec.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hmmqec {

/// Environment state along an outcome branch and its omega-derivative.
struct EnvSensitivityPair {
  ComplexMatrix rho_e;
  ComplexMatrix drho_e;
};

/// Prepare-and-measure settings. `prep` and the columns of `basis` live on
/// P(x)A; the basis may be a partial orthonormal set when the dynamics keep
/// the probe inside its span (e.g. under continuous correction).
struct ProtocolConfig {
  ComplexMatrix env_state;  // initial rho_E
  ComplexVector prep;
  ComplexMatrix basis;      // one column per outcome
  double dwell = 0.0;
  int rounds = 1;
  long samples = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // RNG stream id under `seed`
  int workers = 1;

  /// Throws InputError on bad shapes, non-orthonormal basis, t <= 0, N or
  /// S < 1.
  void validate(int d_e, int pa_dim) const;
};

/// |+i> = (|0> + i|1>)/sqrt2 preparation and X-basis measurement on a qubit
/// probe.
ProtocolConfig default_protocol(const ComplexMatrix& env_state, double dwell, int rounds,
                                long samples, std::uint64_t seed);

/// (c0 + c1)/sqrt2 preparation, outcomes (c0 +- i c1)/sqrt2 (labels +1, -1).
ProtocolConfig codeword_protocol(const MetrologyCode& code, const ComplexMatrix& env_state,
                                 double dwell, int rounds, long samples, std::uint64_t seed);

/// One round as linear maps on vec(rho_E): for outcome b,
/// rho' = A_b rho and drho' = A_b drho + B_b rho.
struct RoundKernel {
  int d_e = 0;
  std::vector<ComplexMatrix> a;
  std::vector<ComplexMatrix> b;

  int outcomes() const { return static_cast<int>(a.size()); }
};

/// Kernel for a generator on E(x)(P(x)A); `l.dim` must equal d_e * prep size.
RoundKernel make_round_kernel(const Liouvillian& l, int d_e, const ProtocolConfig& cfg);
RoundKernel make_round_kernel(const HmmModel& model, const ProtocolConfig& cfg);

struct RoundResult {
  double probability = 0.0;
  double dprobability = 0.0;
  EnvSensitivityPair env;  // unnormalized branch state
};

/// Probability and derivative of `outcome` from the (possibly sub-normalized)
/// branch state; throws NumericalFault below -1e-9, clamps above.
RoundResult round_step(const RoundKernel& kernel, const EnvSensitivityPair& env, int outcome);
RoundResult round_step(const HmmModel& model, const EnvSensitivityPair& env,
                       const ProtocolConfig& cfg, int outcome);

inline constexpr long kDefaultLeafBudget = 1L << 16;

/// Sum over all outcome sequences of (dP)^2 / P; branches with P < 1e-14 are
/// pruned. Throws InputError when outcomes^rounds exceeds `max_leaves`.
double exact_fi(const RoundKernel& kernel, const ProtocolConfig& cfg,
                long max_leaves = kDefaultLeafBudget);
double exact_fi(const HmmModel& model, const ProtocolConfig& cfg,
                long max_leaves = kDefaultLeafBudget);

struct FiEstimate {
  double value = 0.0;
  /// sum score^4 / S^2: biased upward, a heuristic bound on the variance.
  double variance_bound = 0.0;
  long samples_used = 0;
  long aborted = 0;
};

/// Monte Carlo likelihood-score estimate over cfg.samples trajectories.
/// Sample s draws from RngStream(seed, stream).split(s); the result does not
/// depend on cfg.workers.
FiEstimate mc_fi(const RoundKernel& kernel, const ProtocolConfig& cfg);
FiEstimate mc_fi(const HmmModel& model, const ProtocolConfig& cfg);

/// One independent estimate per N; point N uses the stream
/// RngStream(seed, stream).split(N).
std::vector<std::pair<int, FiEstimate>> fi_curve(const RoundKernel& kernel,
                                                 const ProtocolConfig& cfg,
                                                 const std::vector<int>& n_values);

}  // namespace hmmqec

#endif  // HMMQEC_TRAJECTORY_HPP
