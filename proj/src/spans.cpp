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


#include "hmmqec/spans.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hmmqec {

using numkit::identity;
using numkit::kron;

OperatorSpan orthonormalize(int ambient_dim, const std::vector<ComplexMatrix>& generators,
                            std::vector<std::string> labels, double cutoff) {
  OperatorSpan span;
  span.ambient_dim = ambient_dim;
  span.generator_log = std::move(labels);
  if (generators.empty()) return span;
  const Eigen::Index n = static_cast<Eigen::Index>(ambient_dim) * ambient_dim;
  ComplexMatrix stacked(n, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (generators[k].rows() != ambient_dim || generators[k].cols() != ambient_dim)
      throw InputError("orthonormalize: generator has the wrong shape");
    stacked.col(static_cast<Eigen::Index>(k)) = numkit::vec(generators[k]);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return span;
  for (Eigen::Index k = 0; k < sv.size() && sv(k) > cutoff * sv(0); ++k)
    span.basis.push_back(numkit::unvec(svd.matrixU().col(k), ambient_dim, ambient_dim));
  return span;
}

ComplexMatrix environment_block(const ComplexMatrix& op, int d_e, const ComplexVector& bra,
                                const ComplexVector& ket) {
  const auto rest = op.rows() / d_e;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (int a = 0; a < d_e; ++a)
    for (int b = 0; b < d_e; ++b) {
      const Complex w = std::conj(bra(a)) * ket(b);
      if (w != 0.0) out += w * op.block(a * rest, b * rest, rest, rest);
    }
  return out;
}

void require_env_basis(const ComplexMatrix& env_basis, int d_e) {
  if (env_basis.rows() != d_e || env_basis.cols() != d_e)
    throw InputError("environment basis must be d_E x d_E");
  if ((env_basis.adjoint() * env_basis - identity(d_e)).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("environment basis is not orthonormal");
}

namespace {

std::string idx(int i, int j) { return "[" + std::to_string(i) + "," + std::to_string(j) + "]"; }

}  // namespace

OperatorSpan build_extended_span(const HmmModel& model, const ComplexMatrix& env_basis) {
  model.validate();
  require_env_basis(env_basis, model.d_e);
  const int d = model.d_e;
  std::vector<ComplexMatrix> gens{identity(model.d_p)};
  std::vector<std::string> labels{"1"};
  auto block = [&](const ComplexMatrix& op, int i, int m) {
    return environment_block(op, d, env_basis.col(i), env_basis.col(m));
  };
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < d; ++m) {
      gens.push_back(block(model.h_ep, i, m));
      labels.push_back("H_EP" + idx(i, m));
    }
  std::vector<std::vector<ComplexMatrix>> l_blocks, ldag_blocks;
  for (std::size_t k = 0; k < model.jumps.size(); ++k) {
    const ComplexMatrix ld = model.jumps[k].adjoint();
    std::vector<ComplexMatrix> lb, ldb;
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m) {
        lb.push_back(block(model.jumps[k], i, m));
        ldb.push_back(block(ld, i, m));
        gens.push_back(lb.back());
        labels.push_back("L" + std::to_string(k) + idx(i, m));
        gens.push_back(ldb.back());
        labels.push_back("L" + std::to_string(k) + "^dag" + idx(i, m));
      }
    l_blocks.push_back(std::move(lb));
    ldag_blocks.push_back(std::move(ldb));
  }
  for (std::size_t k = 0; k < model.jumps.size(); ++k)
    for (std::size_t j = 0; j < model.jumps.size(); ++j)
      for (std::size_t a = 0; a < ldag_blocks[k].size(); ++a)
        for (std::size_t b = 0; b < l_blocks[j].size(); ++b) {
          gens.push_back(ldag_blocks[k][a] * l_blocks[j][b]);
          labels.push_back("L" + std::to_string(k) + "^dag#" + std::to_string(a) + "*L" +
                           std::to_string(j) + "#" + std::to_string(b));
        }
  return orthonormalize(model.d_p, gens, std::move(labels));
}

OperatorSpan build_diagonal_span(const HmmModel& model, const ComplexMatrix& env_basis) {
  model.validate();
  require_env_basis(env_basis, model.d_e);
  const int d = model.d_e;
  std::vector<ComplexMatrix> gens{identity(model.d_p)};
  std::vector<std::string> labels{"1"};
  std::vector<ComplexMatrix> l_blocks, ldag_blocks;
  for (std::size_t k = 0; k < model.jumps.size(); ++k)
    for (int i = 0; i < d; ++i) {
      l_blocks.push_back(environment_block(model.jumps[k], d, env_basis.col(i), env_basis.col(i)));
      ldag_blocks.push_back(l_blocks.back().adjoint());
      gens.push_back(l_blocks.back());
      labels.push_back("L" + std::to_string(k) + idx(i, i));
      gens.push_back(ldag_blocks.back());
      labels.push_back("L" + std::to_string(k) + "^dag" + idx(i, i));
    }
  for (std::size_t a = 0; a < ldag_blocks.size(); ++a)
    for (std::size_t b = 0; b < l_blocks.size(); ++b) {
      gens.push_back(ldag_blocks[a] * l_blocks[b]);
      labels.push_back("diag#" + std::to_string(a) + "^dag*diag#" + std::to_string(b));
    }
  return orthonormalize(model.d_p, gens, std::move(labels));
}

OperatorSpan build_full_system_span(const HmmModel& model) {
  model.validate();
  const int ep = model.d_e * model.d_p;
  std::vector<ComplexMatrix> gens{identity(ep)};
  std::vector<std::string> labels{"1"};
  const auto& ls = model.jumps;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    gens.push_back(ls[k]);
    labels.push_back("L" + std::to_string(k));
    gens.push_back(ls[k].adjoint());
    labels.push_back("L" + std::to_string(k) + "^dag");
  }
  for (std::size_t k = 0; k < ls.size(); ++k)
    for (std::size_t j = 0; j < ls.size(); ++j) {
      gens.push_back(ls[k].adjoint() * ls[j]);
      labels.push_back("L" + std::to_string(k) + "^dag*L" + std::to_string(j));
    }
  return orthonormalize(ep, gens, std::move(labels));
}

SpanVerdict project(const ComplexMatrix& op, const OperatorSpan& span, double tol) {
  if (op.rows() != span.ambient_dim || op.cols() != span.ambient_dim)
    throw InputError("project: operator shape does not match the span");
  SpanVerdict v;
  v.parallel = ComplexMatrix::Zero(op.rows(), op.cols());
  for (const auto& b : span.basis) v.parallel += numkit::hs_inner(b, op) * b;
  v.orthogonal = op - v.parallel;
  v.residual_norm = v.orthogonal.norm();
  v.in_span = v.residual_norm <= tol * std::max(1.0, op.norm());
  return v;
}

namespace {

// Operators whose environment structure must be block diagonal.
std::vector<ComplexMatrix> coupling_operators(const HmmModel& model) {
  std::vector<ComplexMatrix> ops{model.h_ep};
  for (const auto& l : model.jumps) {
    ops.push_back(l);
    ops.push_back(l.adjoint());
  }
  return ops;
}

double max_offdiagonal_block(const HmmModel& model, const ComplexMatrix& basis) {
  double worst = 0.0;
  for (const auto& op : coupling_operators(model))
    for (int i = 0; i < model.d_e; ++i)
      for (int j = 0; j < model.d_e; ++j)
        if (i != j)
          worst = std::max(worst,
                           environment_block(op, model.d_e, basis.col(i), basis.col(j)).norm());
  const ComplexMatrix he = basis.adjoint() * model.h_e * basis;
  for (int i = 0; i < model.d_e; ++i)
    for (int j = 0; j < model.d_e; ++j)
      if (i != j) worst = std::max(worst, std::abs(he(i, j)));
  return worst;
}

}  // namespace

// The environment operators M with [M (x) 1, O] = 0 for every coupling
// operator O and [M, H_E] = 0 form a *-algebra. A basis of the required kind
// exists iff that algebra contains d_E orthogonal rank-one projectors, i.e.
// iff a generic Hermitian element has a simple spectrum; its eigenvectors are
// then the witness.
DiagonalInteraction is_diagonal_interaction(const HmmModel& model) {
  model.validate();
  const int d = model.d_e;
  DiagonalInteraction out;
  if (d == 1) {
    out.diagonal = true;
    out.env_basis = identity(1);
    return out;
  }
  const int dp = model.d_p;
  const auto ops = coupling_operators(model);
  const Eigen::Index ep2 = static_cast<Eigen::Index>(d * dp) * (d * dp);
  ComplexMatrix system(static_cast<Eigen::Index>(ops.size()) * ep2 + d * d, d * d);
  const ComplexMatrix id_p = identity(dp);
  for (int col = 0; col < d * d; ++col) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(col % d, col / d) = 1.0;  // column-major unit
    const ComplexMatrix lifted = kron(m, id_p);
    for (std::size_t k = 0; k < ops.size(); ++k)
      system.block(static_cast<Eigen::Index>(k) * ep2, col, ep2, 1) =
          numkit::vec(lifted * ops[k] - ops[k] * lifted);
    system.block(static_cast<Eigen::Index>(ops.size()) * ep2, col, d * d, 1) =
        numkit::vec(m * model.h_e - model.h_e * m);
  }
  const ComplexMatrix ns = numkit::null_space(system);

  RngStream rng(0x6469616775ULL, 0);
  ComplexMatrix generic = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < ns.cols(); ++k) {
    const ComplexMatrix n = numkit::unvec(ns.col(k), d, d);
    generic += rng.normal() * (n + n.adjoint()) + rng.normal() * (kI * (n - n.adjoint()));
  }
  const auto eig = numkit::herm_eig(generic);
  const double spread =
      std::max(1e-300, eig.eigenvalues(d - 1) - eig.eigenvalues(0));
  double min_gap = spread;
  for (int i = 1; i < d; ++i)
    min_gap = std::min(min_gap, eig.eigenvalues(i) - eig.eigenvalues(i - 1));
  if (min_gap <= 1e-6 * spread) return out;

  out.max_offdiagonal = max_offdiagonal_block(model, eig.eigenvectors);
  if (out.max_offdiagonal < 1e-8) {
    out.diagonal = true;
    out.env_basis = eig.eigenvectors;
  }
  return out;
}

std::string regime_label(Regime r) {
  switch (r) {
    case Regime::kHeisenberg: return "HNES->HL";
    case Regime::kSqlBound: return "HNLS-violated->SQL-bound";
    case Regime::kEnvelopeLindblad: return "HNELS->envelope-HL";
    case Regime::kEnvelopeUnitary: return "unitary->envelope-HL";
    case Regime::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Classification classify(const HmmModel& model, double tol) {
  model.validate();
  Classification c;
  const DiagonalInteraction diag = is_diagonal_interaction(model);
  c.diagonal = diag.diagonal;
  c.unitary = !model.has_jumps() && model.env_signal_is_zero();

  // The extended span is basis independent; any orthonormal basis will do.
  const ComplexMatrix env_basis = diag.diagonal ? diag.env_basis : identity(model.d_e);
  const OperatorSpan s = build_extended_span(model, env_basis);
  const SpanVerdict hnes = project(model.g, s, tol);
  c.extended_span_size = s.size();
  c.hnes_residual = hnes.residual_norm;

  const OperatorSpan sep = build_full_system_span(model);
  const ComplexMatrix signal =
      kron(identity(model.d_e), model.g) + kron(model.h_e, identity(model.d_p));
  const SpanVerdict hnls = project(signal, sep, tol);
  c.full_span_size = sep.size();
  c.hnls_residual = hnls.residual_norm;

  bool hnels = false;
  if (diag.diagonal) {
    const OperatorSpan so = build_diagonal_span(model, diag.env_basis);
    const SpanVerdict v = project(model.g, so, tol);
    c.diagonal_span_size = so.size();
    c.hnels_residual = v.residual_norm;
    hnels = !v.in_span;
  }

  if (!hnes.in_span)
    c.regime = Regime::kHeisenberg;
  else if (hnls.in_span)
    c.regime = Regime::kSqlBound;
  else if (c.unitary)
    c.regime = Regime::kEnvelopeUnitary;
  else if (hnels)
    c.regime = Regime::kEnvelopeLindblad;
  else
    c.regime = Regime::kIndeterminate;
  return c;
}

}  // namespace hmmqec
