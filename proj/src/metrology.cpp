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


#include "hmmqec/metrology.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/spans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmmqec {

using numkit::identity;
using numkit::kron;

double qfi_mixed(const ComplexMatrix& rho, const ComplexMatrix& drho) {
  numkit::require_hermitian(rho, "qfi.rho", 1e-9);
  numkit::require_hermitian(drho, "qfi.drho", 1e-9);
  if (rho.rows() != drho.rows()) throw InputError("qfi: rho and drho differ in size");
  const auto eig = numkit::herm_eig(rho);
  const ComplexMatrix d = eig.eigenvectors.adjoint() * drho * eig.eigenvectors;
  const auto& g = eig.eigenvalues;
  double f = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double s = g(i) + g(j);
      if (s > 1e-12) f += std::norm(d(i, j)) / s;
    }
  return 2.0 * f;
}

Complex EnvelopeSeries::alpha(double t) const {
  Complex a = 0.0;
  for (std::size_t m = 0; m < coefficients.size(); ++m)
    a += coefficients[m] * std::exp(-kI * t * frequencies[m]);
  return a;
}

EnvelopeSeries envelope_alpha(const HmmModel& model, const MetrologyCode& code,
                              const ComplexVector& env_state) {
  model.validate();
  if (model.has_jumps()) throw InputError("envelope_alpha: the model has jump operators");
  if (!model.env_signal_is_zero()) throw InputError("envelope_alpha: H_E must vanish");
  if (model.d_p != code.d_p) throw InputError("envelope_alpha: code and model disagree on d_P");
  if (env_state.size() != model.d_e) throw InputError("envelope_alpha: environment state size");
  const ComplexVector env = env_state.normalized();
  const int d = model.d_e;
  const ComplexMatrix h = kron(model.h_ep, identity(code.d_a));
  // Environment blocks <C_c| H |C_c>.
  auto block = [&](const ComplexVector& c) {
    const ComplexMatrix lift = kron(identity(d), c);
    return ComplexMatrix(lift.adjoint() * h * lift);
  };
  const auto e0 = numkit::herm_eig(block(code.c0));
  const auto e1 = numkit::herm_eig(block(code.c1));
  const double r = 1.0 / std::sqrt(2.0);
  const ComplexVector c0 = r * (e0.eigenvectors.adjoint() * env);
  const ComplexVector c1 = r * (e1.eigenvectors.adjoint() * env);
  const ComplexMatrix overlap = e1.eigenvectors.adjoint() * e0.eigenvectors;  // <psi_l^1|psi_k^0>
  EnvelopeSeries s;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      s.coefficients.push_back(c0(k) * std::conj(c1(l)) * overlap(l, k));
      s.frequencies.push_back(e0.eigenvalues(k) - e1.eigenvalues(l));
    }
  return s;
}

double qfi_envelope(const EnvelopeSeries& series, double delta_lambda, double t) {
  if (!(t >= 0.0)) throw InputError("qfi_envelope: time must be non-negative");
  return 4.0 * t * t * delta_lambda * delta_lambda * std::norm(series.alpha(t));
}

namespace {

double golden_max(const EnvelopeSeries& s, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = s.abs_alpha(c), fd = s.abs_alpha(d);
  for (int it = 0; it < 100 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = s.abs_alpha(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = s.abs_alpha(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> find_revivals(const EnvelopeSeries& series, double threshold, double t_min,
                                  double t_max, int grid) {
  if (grid < 2) throw InputError("find_revivals: grid must have at least 2 points");
  if (!(t_max > t_min)) throw InputError("find_revivals: empty window");
  const double h = (t_max - t_min) / (grid - 1);
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) vals[i] = series.abs_alpha(t_min + i * h);
  std::vector<double> out;
  for (int i = 0; i < grid; ++i) {
    if (vals[i] < threshold) continue;
    const double t = t_min + i * h;
    const bool left = i == 0 || vals[i] >= vals[i - 1];
    const bool right = i == grid - 1 || vals[i] >= vals[i + 1];
    if (left && right) {
      const double a = std::max(t_min, t - h), b = std::min(t_max, t + h);
      const double best = golden_max(series, a, b);
      out.push_back(series.abs_alpha(best) >= vals[i] ? best : t);
    } else {
      out.push_back(t);
    }
  }
  return out;
}

ProbabilityPair diagonal_probability(Complex gamma, double delta_lambda, double omega, double t) {
  if (!(t >= 0.0)) throw InputError("diagonal_probability: time must be non-negative");
  if (gamma.real() < -1e-12) throw InputError("diagonal_probability: Re(gamma) must be >= 0");
  const double decay = std::exp(-gamma.real() * t);
  const double phase = (gamma.imag() + omega * delta_lambda) * t;
  ProbabilityPair r;
  r.p = 0.5 + 0.5 * decay * std::sin(phase);
  r.dp = 0.5 * decay * delta_lambda * t * std::cos(phase);
  return r;
}

Complex diagonal_gamma(const HmmModel& model, const MetrologyCode& code, const ComplexVector& phi) {
  model.validate();
  if (model.d_p != code.d_p) throw InputError("diagonal_gamma: code and model disagree on d_P");
  const ComplexMatrix id_a = identity(code.d_a);
  auto expect = [&](const ComplexMatrix& op_ep, const ComplexVector& c) {
    const ComplexMatrix block = environment_block(op_ep, model.d_e, phi, phi);
    return c.dot(kron(block, id_a) * c);
  };
  Complex gamma = kI * (expect(model.h_ep, code.c0) - expect(model.h_ep, code.c1));
  for (const auto& l : model.jumps) {
    const ComplexMatrix ldl = l.adjoint() * l;
    gamma += 0.5 * (expect(ldl, code.c0) + expect(ldl, code.c1)) -
             expect(l, code.c0) * std::conj(expect(l, code.c1));
  }
  return gamma;
}

std::array<ComplexMatrix, 2> logical_dephasing_kraus(Complex gamma, double t) {
  if (!(t >= 0.0)) throw InputError("logical_dephasing_kraus: time must be non-negative");
  const double decay = std::exp(-gamma.real() * t);
  ComplexMatrix rot = ComplexMatrix::Zero(2, 2);
  rot(0, 0) = std::exp(-0.5 * kI * gamma.imag() * t);
  rot(1, 1) = std::exp(0.5 * kI * gamma.imag() * t);
  return {std::sqrt(0.5 * (1.0 + decay)) * rot,
          std::sqrt(0.5 * (1.0 - decay)) * numkit::pauli_z() * rot};
}

void BinomialMixture::validate() const {
  if (weights.size() != probabilities.size() || weights.size() != derivatives.size())
    throw InputError("binomial mixture: component arrays differ in length");
  if (weights.empty()) throw InputError("binomial mixture: no components");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw InputError("binomial mixture: negative weight");
    if (!(probabilities[i] > 0.0 && probabilities[i] < 1.0))
      throw InputError("binomial mixture: probabilities must lie strictly inside (0, 1)");
    if (!std::isfinite(derivatives[i])) throw InputError("binomial mixture: derivative not finite");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-10) throw InputError("binomial mixture: weights do not sum to 1");
}

BinomialMixture BinomialMixture::merged() const {
  validate();
  BinomialMixture out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    bool placed = false;
    for (std::size_t j = 0; j < out.weights.size(); ++j) {
      if (std::abs(out.probabilities[j] - probabilities[i]) < 1e-10) {
        const double w = out.weights[j] + weights[i];
        if (w > 0.0)
          out.derivatives[j] = (out.weights[j] * out.derivatives[j] + weights[i] * derivatives[i]) / w;
        out.weights[j] = w;
        placed = true;
        break;
      }
    }
    if (!placed) {
      out.weights.push_back(weights[i]);
      out.probabilities.push_back(probabilities[i]);
      out.derivatives.push_back(derivatives[i]);
    }
  }
  return out;
}

double binomial_mixture_fi(const BinomialMixture& mix, int n) {
  if (n < 1) throw InputError("binomial_mixture_fi: n must be at least 1");
  const BinomialMixture m = mix.merged();
  const std::size_t k = m.weights.size();
  std::vector<double> logw(k), logp(k), logq(k);
  for (std::size_t i = 0; i < k; ++i) {
    logw[i] = m.weights[i] > 0.0 ? std::log(m.weights[i]) : -std::numeric_limits<double>::infinity();
    logp[i] = std::log(m.probabilities[i]);
    logq[i] = std::log1p(-m.probabilities[i]);
  }
  const double lgn = std::lgamma(n + 1.0);
  std::vector<double> logt(k);
  double fi = 0.0;
  for (int n1 = 0; n1 <= n; ++n1) {
    const double lc = lgn - std::lgamma(n1 + 1.0) - std::lgamma(n - n1 + 1.0);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      logt[i] = logw[i] + lc + n1 * logp[i] + (n - n1) * logq[i];
      top = std::max(top, logt[i]);
    }
    if (!std::isfinite(top)) continue;
    double p = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double e = std::exp(logt[i] - top);
      const double pi = m.probabilities[i];
      p += e;
      dp += e * (n1 / pi - (n - n1) / (1.0 - pi)) * m.derivatives[i];
    }
    fi += std::exp(top) * dp * dp / p;
  }
  return fi;
}

StatePair dephasing_probe_state(double t) {
  if (!(t >= 0.0)) throw InputError("dephasing_probe_state: time must be non-negative");
  const ComplexVector plus = (numkit::basis_vector(2, 0) + numkit::basis_vector(2, 1)) / std::sqrt(2.0);
  // Environment branch |0>: coupling rotation exp(-itZ); the signal adds
  // exp(-i omega t Z), whose omega-derivative at omega = 0 is -itZ.
  const ComplexMatrix z = numkit::pauli_z();
  const ComplexVector psi = numkit::expm(-kI * t * z) * plus;
  const double r = std::exp(-2.0 * t);
  const ComplexMatrix pure = numkit::ket_bra(psi, psi);
  StatePair s;
  s.rho = r * pure + 0.5 * (1.0 - r) * identity(2);
  s.drho = r * (-kI * t) * (z * pure - pure * z);
  return s;
}

double dephasing_closed_form(double t) {
  const StatePair s = dephasing_probe_state(t);
  return qfi_mixed(s.rho, s.drho);
}

}  // namespace hmmqec
