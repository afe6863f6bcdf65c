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

#include "hmmqec/numkit.hpp"

#include "hmmqec/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace hmmqec::numkit {

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix ket_bra(const ComplexVector& ket, const ComplexVector& bra) {
  return ket * bra.adjoint();
}

ComplexVector basis_vector(int dim, int index) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

double max_abs_deviation_from_hermitian(const ComplexMatrix& m) {
  if (!is_square(m)) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs_deviation_from_hermitian(m) <= tol;
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) throw InputError(std::string(what) + ": non-finite entry");
}

void require_hermitian(const ComplexMatrix& m, const char* what, double tol) {
  require_finite(m, what);
  if (!is_square(m)) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw InputError(os.str());
  }
  const double dev = max_abs_deviation_from_hermitian(m);
  if (dev > tol) {
    std::ostringstream os;
    os << what << ": not Hermitian (max |m - m^dagger| = " << dev << ")";
    throw InputError(os.str());
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw InputError("partial_trace: subsystem dimensions must be positive");
    total *= d;
  }
  if (m.rows() != m.cols() || m.rows() != total) {
    std::ostringstream os;
    os << "partial_trace: matrix is " << m.rows() << "x" << m.cols()
       << " but subsystem dimensions multiply to " << total;
    throw InputError(os.str());
  }
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw InputError("partial_trace: kept index out of range");
    if (kept[k]) throw InputError("partial_trace: duplicate kept index");
    kept[k] = true;
  }

  // Split every full index into (kept multi-index, traced multi-index).
  long kept_dim = 1;
  for (int s = 0; s < n; ++s)
    if (kept[s]) kept_dim *= dims[s];
  std::vector<long> kept_index(total), traced_index(total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx, k = 0, t = 0, kstride = 1, tstride = 1;
    for (int s = n - 1; s >= 0; --s) {
      const long digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        k += digit * kstride;
        kstride *= dims[s];
      } else {
        t += digit * tstride;
        tstride *= dims[s];
      }
    }
    kept_index[idx] = k;
    traced_index[idx] = t;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (long j = 0; j < total; ++j)
    for (long i = 0; i < total; ++i)
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += m(i, j);
  return out;
}

ComplexMatrix expm(const ComplexMatrix& m) {
  if (!is_square(m)) throw InputError("expm: matrix must be square");
  require_finite(m, "expm");
  if (m.size() == 0) return m;
  return m.exp();
}

HermitianEigenSystem herm_eig(const ComplexMatrix& m) {
  require_hermitian(m, "herm_eig");
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalFault("herm_eig: eigensolver did not converge");
  HermitianEigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    const double biggest = col.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::abs(col(pivot)) < biggest - 1e-12) ++pivot;
    const Complex phase = std::conj(col(pivot)) / std::abs(col(pivot));
    col *= phase;
    col(pivot) = std::abs(col(pivot));
  }
  return out;
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "hs_inner: shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols();
    throw InputError(os.str());
  }
  return (a.conjugate().cwiseProduct(b)).sum();
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw InputError("unvec: length does not match the requested shape");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix sandwich_superop(const ComplexMatrix& a, const ComplexMatrix& b) {
  return kron(b.transpose(), a);
}

ComplexMatrix kraus_superop(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw InputError("kraus_superop: empty Kraus list");
  const auto n = kraus.front().cols();
  ComplexMatrix s = ComplexMatrix::Zero(kraus.front().rows() * kraus.front().rows(), n * n);
  for (const auto& k : kraus) s += sandwich_superop(k, k.adjoint());
  return s;
}

ComplexMatrix apply_kraus(std::span<const ComplexMatrix> kraus, const ComplexMatrix& x) {
  if (kraus.empty()) throw InputError("apply_kraus: empty Kraus list");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out.noalias() += k * x * k.adjoint();
  return out;
}

ComplexMatrix null_space(const ComplexMatrix& m, double rel_tol) {
  const auto cols = m.cols();
  if (m.rows() == 0) return ComplexMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = std::max(rel_tol * largest, 1e-14);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace hmmqec::numkit
