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


#ifndef HMMQEC_METROLOGY_HPP
#define HMMQEC_METROLOGY_HPP

#include "hmmqec/model.hpp"
#include "hmmqec/numkit.hpp"
#include "hmmqec/qec.hpp"

#include <array>
#include <vector>

namespace hmmqec {

/// 2 sum_{ij} |<g_i|drho|g_j>|^2 / (g_i + g_j) over pairs with g_i + g_j > 1e-12.
double qfi_mixed(const ComplexMatrix& rho, const ComplexMatrix& drho);

/// alpha(t) = sum_m c_m exp(-i t phi_m).
struct EnvelopeSeries {
  std::vector<Complex> coefficients;
  std::vector<double> frequencies;

  Complex alpha(double t) const;
  double abs_alpha(double t) const { return std::abs(alpha(t)); }
};

/// Logical coherence envelope of the unitary protocol for a pure environment
/// state. Requires no jumps and H_E = 0.
EnvelopeSeries envelope_alpha(const HmmModel& model, const MetrologyCode& code,
                              const ComplexVector& env_state);

/// 4 t^2 (delta lambda)^2 |alpha(t)|^2.
double qfi_envelope(const EnvelopeSeries& series, double delta_lambda, double t);

/// Grid points in [t_min, t_max] where |alpha| >= threshold; grid-local maxima
/// are replaced by their golden-section refinement.
std::vector<double> find_revivals(const EnvelopeSeries& series, double threshold, double t_min,
                                  double t_max, int grid);

struct ProbabilityPair {
  double p = 0.0;
  double dp = 0.0;
};

/// Probability of the +1 outcome of the diagonal prepare-and-measure
/// protocol and its omega-derivative.
ProbabilityPair diagonal_probability(Complex gamma, double delta_lambda, double omega, double t);

/// Rate Gamma for environment branch |phi> of a diagonal model under the
/// marker recovery: i(h0 - h1) + sum_k [(m0 + m1)/2 - l0 conj(l1)].
Complex diagonal_gamma(const HmmModel& model, const MetrologyCode& code, const ComplexVector& phi);

/// Kraus pair of the integrated logical dynamics on span{c0, c1}, in that
/// basis.
std::array<ComplexMatrix, 2> logical_dephasing_kraus(Complex gamma, double t);

/// sum_i alpha_i Binomial(n, p_i) with the omega-derivatives of the p_i.
struct BinomialMixture {
  std::vector<double> weights;
  std::vector<double> probabilities;
  std::vector<double> derivatives;

  /// Throws InputError on mismatched sizes, negative weights, weights not
  /// summing to 1, or p outside (0, 1).
  void validate() const;
  /// Components with |p_i - p_j| < 1e-10 merged (derivatives weight-averaged).
  BinomialMixture merged() const;
};

/// Fisher information of the outcome count after n rounds, in log space.
double binomial_mixture_fi(const BinomialMixture& mix, int n);

/// Per-probe state of the two-qubit dephasing model at omega = 0, with its
/// omega-derivative.
StatePair dephasing_probe_state(double t);

/// Per-probe QFI of the two-qubit dephasing model; 4 t^2 exp(-4t).
double dephasing_closed_form(double t);

}  // namespace hmmqec

#endif  // HMMQEC_METROLOGY_HPP
