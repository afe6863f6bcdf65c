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


#include "hmmqec/qec.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/spans.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hmmqec {

using numkit::identity;
using numkit::kron;

MetrologyCode build_code_from_gperp(const ComplexMatrix& g_perp, const ComplexMatrix& g) {
  numkit::require_hermitian(g_perp, "g_perp");
  numkit::require_hermitian(g, "g");
  if (g.rows() != g_perp.rows()) throw InputError("build_code: G and G_perp differ in size");
  const int d = static_cast<int>(g_perp.rows());
  const double scale = std::max(1.0, g_perp.norm());
  if (std::abs(g_perp.trace()) > 1e-9 * scale) throw InputError("build_code: G_perp is not traceless");
  if (g_perp.norm() < 1e-9) throw InputError("build_code: G_perp vanishes; no code by this route");

  const auto eig = numkit::herm_eig(g_perp);
  double half_abs = 0.0;
  for (int i = 0; i < d; ++i) half_abs += 0.5 * std::abs(eig.eigenvalues(i));

  MetrologyCode code;
  code.d_p = d;
  code.d_a = d;
  code.c0 = ComplexVector::Zero(d * d);
  code.c1 = ComplexVector::Zero(d * d);
  code.marker0 = ComplexMatrix::Zero(d, d);
  code.marker1 = ComplexMatrix::Zero(d, d);
  // Descending order: auxiliary index a labels the a-th largest eigenvalue.
  for (int a = 0; a < d; ++a) {
    const int i = d - 1 - a;
    const double lam = eig.eigenvalues(i);
    const ComplexVector aux = numkit::basis_vector(d, a);
    const ComplexVector term = kron(eig.eigenvectors.col(i), aux);
    const bool positive = lam >= -1e-12 * scale;
    const double w = std::sqrt(std::abs(lam) / half_abs);
    if (positive) {
      code.c0 += w * term;
      code.marker0(a, a) = 1.0;
    } else {
      code.c1 += w * term;
      code.marker1(a, a) = 1.0;
    }
  }
  code.projector = numkit::ket_bra(code.c0, code.c0) + numkit::ket_bra(code.c1, code.c1);
  const ComplexMatrix g_lift = kron(g, identity(d));
  code.lambda0 = code.c0.dot(g_lift * code.c0).real();
  code.lambda1 = code.c1.dot(g_lift * code.c1).real();
  return code;
}

std::vector<ComplexMatrix> ExtendedErrorSet::operators() const {
  std::vector<ComplexMatrix> out;
  out.reserve(errors.size());
  for (const auto& e : errors) out.push_back(e.op);
  return out;
}

ExtendedErrorSet extended_errors(const std::vector<ComplexMatrix>& errors,
                                 const ComplexMatrix& env_basis) {
  const int d_e = static_cast<int>(env_basis.rows());
  require_env_basis(env_basis, d_e);
  ExtendedErrorSet out;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].rows() != errors[i].cols() || errors[i].rows() % d_e != 0)
      throw InputError("extended_errors: error dimension is not a multiple of d_E");
    for (int n = 0; n < d_e; ++n)
      for (int k = 0; k < d_e; ++k)
        out.errors.push_back({environment_block(errors[i], d_e, env_basis.col(n), env_basis.col(k)),
                              static_cast<int>(i), n, k});
  }
  return out;
}

ExtendedErrorSet lindblad_errors(const HmmModel& model, const ComplexMatrix& env_basis, int d_a) {
  model.validate();
  const ComplexMatrix id_a = identity(d_a);
  std::vector<ComplexMatrix> ops{identity(model.d_e * model.d_p * d_a)};
  for (const auto& l : model.jumps) ops.push_back(kron(l, id_a));
  return extended_errors(ops, env_basis);
}

ExtendedErrorSet plain_errors(const std::vector<ComplexMatrix>& errors) {
  ExtendedErrorSet out;
  for (std::size_t i = 0; i < errors.size(); ++i)
    out.errors.push_back({errors[i], static_cast<int>(i), 0, 0});
  return out;
}

void require_projector(const ComplexMatrix& p) {
  if (!numkit::is_square(p)) throw InputError("projector is not square");
  if (!numkit::is_hermitian(p)) throw InputError("projector is not Hermitian");
  if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10) throw InputError("projector is not idempotent");
}

KlReport kl_check(const ComplexMatrix& projector, const ExtendedErrorSet& errs, double tol) {
  require_projector(projector);
  const double rank = projector.trace().real();
  if (rank < 0.5) throw InputError("kl_check: empty codespace");
  const auto n = static_cast<Eigen::Index>(errs.size());
  std::vector<ComplexMatrix> ep;
  ep.reserve(errs.size());
  for (const auto& e : errs.errors) {
    if (e.op.rows() != projector.rows()) throw InputError("kl_check: error dimension mismatch");
    ep.push_back(e.op * projector);
  }
  KlReport r;
  r.c = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const ComplexMatrix m = ep[a].adjoint() * ep[b];
      r.c(a, b) = m.trace() / rank;
      r.max_residual = std::max(r.max_residual, (m - r.c(a, b) * projector).norm());
    }
  r.satisfied = r.max_residual <= tol;
  return r;
}

KrausList recovery_channel(const ComplexMatrix& projector, const ExtendedErrorSet& errs,
                           double tol) {
  const KlReport report = kl_check(projector, errs, tol);
  if (!report.satisfied) {
    std::ostringstream os;
    os << "recovery_channel: Knill-Laflamme conditions violated (max residual "
       << report.max_residual << ")";
    throw InputError(os.str());
  }
  const int dim = static_cast<int>(projector.rows());
  const auto n = static_cast<Eigen::Index>(errs.size());
  const auto pe = numkit::herm_eig(projector);
  const ComplexVector anchor = pe.eigenvectors.col(dim - 1);

  KrausList kraus;
  ComplexMatrix covered = ComplexMatrix::Zero(dim, dim);
  if (n > 0) {
    const auto ce = numkit::herm_eig(0.5 * (report.c + report.c.adjoint()));
    const double top = std::max(ce.eigenvalues.maxCoeff(), 0.0);
    for (Eigen::Index a = 0; a < n; ++a) {
      const double da = ce.eigenvalues(a);
      if (da <= 1e-12 * top || da <= 0.0) continue;
      ComplexMatrix f = ComplexMatrix::Zero(dim, dim);
      for (Eigen::Index b = 0; b < n; ++b) f += ce.eigenvectors(b, a) * errs.errors[b].op;
      const ComplexMatrix r = projector * f.adjoint() / std::sqrt(da);
      covered += r.adjoint() * r;
      kraus.push_back(r);
    }
  }
  // Everything not reached by a syndrome is sent to a fixed code state.
  const auto rest = numkit::herm_eig(identity(dim) - covered);
  for (int j = 0; j < dim; ++j)
    if (rest.eigenvalues(j) > 0.5)
      kraus.push_back(anchor * rest.eigenvectors.col(j).adjoint());
  return kraus;
}

KrausList dephasing_recovery(const MetrologyCode& code) {
  if ((code.marker0 * code.marker1).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("dephasing_recovery: marker subspaces overlap");
  KrausList kraus;
  const ComplexMatrix markers[2] = {code.marker0, code.marker1};
  const ComplexVector* words[2] = {&code.c0, &code.c1};
  for (int c = 0; c < 2; ++c)
    for (int p = 0; p < code.d_p; ++p)
      for (int a = 0; a < code.d_a; ++a) {
        if (std::abs(markers[c](a, a)) < 0.5) continue;
        const ComplexVector e = kron(numkit::basis_vector(code.d_p, p), numkit::basis_vector(code.d_a, a));
        kraus.push_back(*words[c] * e.adjoint());
      }
  return kraus;
}

ComplexMatrix correction_superop(const MetrologyCode& code, const KrausList& recovery, int d_e) {
  const ComplexMatrix id_e = identity(d_e);
  const ComplexMatrix p = kron(id_e, code.projector);
  const ComplexMatrix q = identity(static_cast<int>(p.rows())) - p;
  ComplexMatrix out = numkit::sandwich_superop(p, p);
  if (recovery.empty()) return out + numkit::sandwich_superop(q, q);
  KrausList lifted;
  lifted.reserve(recovery.size());
  for (const auto& k : recovery) lifted.push_back(kron(id_e, k));
  return out + numkit::kraus_superop(lifted) * numkit::sandwich_superop(q, q);
}

namespace {

HmmModel lift_to_code(const HmmModel& model, const MetrologyCode& code) {
  if (model.d_p != code.d_p) throw InputError("code and model disagree on d_P");
  return model.with_auxiliary(code.d_a);
}

StatePair apply_superop(const ComplexMatrix& s, const StatePair& in) {
  const int n = static_cast<int>(in.rho.rows());
  return {numkit::unvec(s * numkit::vec(in.rho), n, n), numkit::unvec(s * numkit::vec(in.drho), n, n)};
}

}  // namespace

StatePair zeno_project_evolution(const HmmModel& model, const MetrologyCode& code,
                                 const StatePair& initial, double t, int steps,
                                 const KrausList& recovery) {
  if (steps < 1) throw InputError("zeno_project_evolution: steps must be at least 1");
  const HmmModel m = lift_to_code(model, code);
  const ComplexMatrix d = correction_superop(code, recovery, m.d_e);
  const AugmentedPropagator prop = make_propagator(build_liouvillian(m), t / steps);
  // One round of [evolve; correct] as a single pair of superoperators.
  const ComplexMatrix round = d * prop.map;
  const ComplexMatrix dround = d * prop.dmap;
  StatePair s = initial;
  const int n = m.joint_dim();
  for (int k = 0; k < steps; ++k) {
    const ComplexVector r = numkit::vec(s.rho);
    const ComplexVector dr = numkit::vec(s.drho);
    s.rho = numkit::unvec(round * r, n, n);
    s.drho = numkit::unvec(round * dr + dround * r, n, n);
  }
  return s;
}

Liouvillian corrected_liouvillian(const HmmModel& model, const MetrologyCode& code,
                                  const KrausList& recovery) {
  const HmmModel m = lift_to_code(model, code);
  const ComplexMatrix d = correction_superop(code, recovery, m.d_e);
  const ComplexMatrix p = kron(identity(m.d_e), code.projector);
  const ComplexMatrix proj = numkit::sandwich_superop(p, p);
  const Liouvillian l = build_liouvillian(m);
  Liouvillian eff;
  eff.dim = l.dim;
  eff.generator = d * l.generator * proj;
  eff.d_omega_generator = d * l.d_omega_generator * proj;
  return eff;
}

StatePair projected_generator_evolution(const HmmModel& model, const MetrologyCode& code,
                                        const StatePair& initial, double t,
                                        const KrausList& recovery) {
  const ComplexMatrix p = kron(identity(model.d_e), code.projector);
  return make_propagator(corrected_liouvillian(model, code, recovery), t)
      .apply(apply_superop(numkit::sandwich_superop(p, p), initial));
}

StatePair logical_plus_state(const MetrologyCode& code, const ComplexVector& env) {
  const ComplexVector plus = (code.c0 + code.c1) / std::sqrt(2.0);
  return product_state(numkit::ket_bra(env, env), numkit::ket_bra(plus, plus));
}

}  // namespace hmmqec
