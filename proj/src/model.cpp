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

#include "hmmqec/model.hpp"

#include "hmmqec/errors.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

namespace hmmqec {

using numkit::kron;

namespace {

void require_shape(const ComplexMatrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x"
       << m.cols();
    throw InputError(os.str());
  }
}

}  // namespace

void HmmModel::validate() const {
  if (d_e < 1 || d_p < 1 || d_a < 1) throw InputError("model: dimensions must be positive");
  if (d_p < 2) throw InputError("model: probe dimension must be at least 2");
  const int ep = d_e * d_p;
  require_shape(h_ep, ep, ep, "model.H_EP");
  require_shape(g, d_p, d_p, "model.G");
  require_shape(h_e, d_e, d_e, "model.H_E");
  numkit::require_hermitian(h_ep, "model.H_EP");
  numkit::require_hermitian(g, "model.G");
  numkit::require_hermitian(h_e, "model.H_E");
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const std::string name = "model.jumps[" + std::to_string(k) + "]";
    require_shape(jumps[k], ep, ep, name);
    numkit::require_finite(jumps[k], name.c_str());
  }
  if (!std::isfinite(omega)) throw InputError("model.omega: not finite");
  const ComplexMatrix traceless =
      g - (g.trace() / static_cast<double>(d_p)) * ComplexMatrix::Identity(d_p, d_p);
  if (traceless.norm() <= 1e-12 * std::max(1.0, g.norm()))
    throw InputError("model.G: signal generator is proportional to the identity");
}

HmmModel HmmModel::with_auxiliary(int aux_dim) const {
  HmmModel m = *this;
  m.d_a = aux_dim;
  return m;
}

HmmModel HmmModel::with_omega(double w) const {
  HmmModel m = *this;
  m.omega = w;
  return m;
}

bool HmmModel::env_signal_is_zero(double tol) const {
  return h_e.size() == 0 || h_e.cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix HmmModel::lift_ep(const ComplexMatrix& op_ep) const {
  return kron(op_ep, numkit::identity(d_a));
}

ComplexMatrix HmmModel::signal_joint() const {
  const ComplexMatrix id_e = numkit::identity(d_e);
  const ComplexMatrix id_p = numkit::identity(d_p);
  return lift_ep(kron(id_e, g) + kron(h_e, id_p));
}

ComplexMatrix HmmModel::total_hamiltonian() const {
  return lift_ep(h_ep) + omega * signal_joint();
}

HmmModel make_model(int d_e, int d_p, ComplexMatrix h_ep, ComplexMatrix g, ComplexMatrix h_e,
                    std::vector<ComplexMatrix> jumps, double omega) {
  HmmModel m;
  m.d_e = d_e;
  m.d_p = d_p;
  m.d_a = 1;
  m.h_ep = std::move(h_ep);
  m.g = std::move(g);
  m.h_e = std::move(h_e);
  m.jumps = std::move(jumps);
  m.omega = omega;
  m.validate();
  return m;
}

ComplexMatrix commutator_superop(const ComplexMatrix& h) {
  const ComplexMatrix id = numkit::identity(static_cast<int>(h.rows()));
  return -kI * (kron(id, h) - kron(h.transpose(), id));
}

ComplexMatrix dissipator_superop(const ComplexMatrix& l) {
  const ComplexMatrix id = numkit::identity(static_cast<int>(l.rows()));
  const ComplexMatrix ldl = l.adjoint() * l;
  return kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
}

Liouvillian build_liouvillian(const HmmModel& model) {
  model.validate();
  Liouvillian out;
  out.dim = model.joint_dim();
  out.generator = commutator_superop(model.total_hamiltonian());
  for (const auto& l : model.jumps) out.generator += dissipator_superop(model.lift_ep(l));
  out.d_omega_generator = commutator_superop(model.signal_joint());
  return out;
}

StatePair AugmentedPropagator::apply(const StatePair& s) const {
  const ComplexVector r = numkit::vec(s.rho);
  const ComplexVector dr = numkit::vec(s.drho);
  StatePair out;
  out.rho = numkit::unvec(map * r, dim, dim);
  out.drho = numkit::unvec(map * dr + dmap * r, dim, dim);
  return out;
}

AugmentedPropagator make_propagator(const Liouvillian& l, double t) {
  if (!(t >= 0.0)) throw InputError("propagate: time must be non-negative");
  const auto n = l.generator.rows();
  ComplexMatrix aug = ComplexMatrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = t * l.generator;
  aug.bottomRightCorner(n, n) = t * l.generator;
  aug.bottomLeftCorner(n, n) = t * l.d_omega_generator;
  const ComplexMatrix e = numkit::expm(aug);
  AugmentedPropagator p;
  p.dim = l.dim;
  p.map = e.topLeftCorner(n, n);
  p.dmap = e.bottomLeftCorner(n, n);
  return p;
}

StatePair propagate(const HmmModel& model, const StatePair& state, double t) {
  if (!(t >= 0.0)) throw InputError("propagate: time must be non-negative");
  const int n = model.joint_dim();
  if (state.rho.rows() != n || state.rho.cols() != n || state.drho.rows() != n ||
      state.drho.cols() != n)
    throw InputError("propagate: state dimension does not match the model");
  return make_propagator(build_liouvillian(model), t).apply(state);
}

ComplexMatrix apply_generator(const HmmModel& model, const ComplexMatrix& rho) {
  const ComplexMatrix h = model.total_hamiltonian();
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& l0 : model.jumps) {
    const ComplexMatrix l = model.lift_ep(l0);
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

ComplexMatrix first_order_step(const HmmModel& model, const ComplexMatrix& rho, double dt) {
  return rho + dt * apply_generator(model, rho);
}

void validate_state_pair(const StatePair& s) {
  numkit::require_hermitian(s.rho, "state.rho", 1e-9);
  numkit::require_hermitian(s.drho, "state.drho", 1e-9);
  if (std::abs(s.rho.trace() - 1.0) > 1e-10) throw InputError("state.rho: trace is not 1");
  if (std::abs(s.drho.trace()) > 1e-10) throw InputError("state.drho: trace is not 0");
  const auto eig = numkit::herm_eig(s.rho);
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) < -1e-9)
    throw InputError("state.rho: not positive semidefinite");
}

ComplexMatrix dephase_environment(const ComplexMatrix& rho, const ComplexMatrix& env_basis,
                                  int rest_dim) {
  const ComplexMatrix id = numkit::identity(rest_dim);
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index k = 0; k < env_basis.cols(); ++k) {
    const ComplexMatrix proj = kron(numkit::ket_bra(env_basis.col(k), env_basis.col(k)), id);
    out += proj * rho * proj;
  }
  return out;
}

ComplexMatrix trace_out_environment(const ComplexMatrix& m, int d_e, int rest_dim) {
  const std::array<int, 2> dims{d_e, rest_dim};
  const std::array<int, 1> keep{1};
  return numkit::partial_trace(m, dims, keep);
}

namespace {

ComplexMatrix evolve_reduced(const HmmModel& model, const ComplexMatrix& rho, double t) {
  const Liouvillian l = build_liouvillian(model);
  const ComplexMatrix e = numkit::expm(t * l.generator);
  const int n = model.joint_dim();
  const ComplexMatrix out = numkit::unvec(e * numkit::vec(rho), n, n);
  return trace_out_environment(out, model.d_e, model.probe_aux_dim());
}

}  // namespace

double check_dephasing_lemma(const HmmModel& model, const ComplexMatrix& env_basis,
                             const ComplexMatrix& rho, double t) {
  const ComplexMatrix direct = evolve_reduced(model, rho, t);
  const ComplexMatrix dephased =
      evolve_reduced(model, dephase_environment(rho, env_basis, model.probe_aux_dim()), t);
  return (direct - dephased).norm();
}

double check_env_signal_lemma(const HmmModel& model, const ComplexMatrix& rho, double t) {
  HmmModel without = model;
  without.h_e = ComplexMatrix::Zero(model.d_e, model.d_e);
  return (evolve_reduced(model, rho, t) - evolve_reduced(without, rho, t)).norm();
}

StatePair product_state(const ComplexMatrix& rho_e, const ComplexMatrix& rho_pa) {
  StatePair s;
  s.rho = kron(rho_e, rho_pa);
  s.drho = ComplexMatrix::Zero(s.rho.rows(), s.rho.cols());
  return s;
}

}  // namespace hmmqec
