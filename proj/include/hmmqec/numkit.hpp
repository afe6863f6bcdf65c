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

#ifndef HMMQEC_NUMKIT_HPP
#define HMMQEC_NUMKIT_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace hmmqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Absolute tolerance on the max-entry deviation from Hermiticity.
inline constexpr double kHermitianTol = 1e-10;

namespace numkit {

// Pauli matrices and friends.
ComplexMatrix identity(int dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix ket_bra(const ComplexVector& ket, const ComplexVector& bra);
ComplexVector basis_vector(int dim, int index);

bool all_finite(const ComplexMatrix& m);
bool is_square(const ComplexMatrix& m);
double max_abs_deviation_from_hermitian(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

/// Throws InputError naming `what` when `m` is not finite.
void require_finite(const ComplexMatrix& m, const char* what);
/// Throws InputError naming `what` unless `m` is square, finite and Hermitian.
void require_hermitian(const ComplexMatrix& m, const char* what, double tol = kHermitianTol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product of a list of factors, left to right.
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// Reduced matrix over the subsystems listed in `keep` (ascending order is
/// not required; the output keeps the factors in their original order).
/// `dims` lists the subsystem dimensions, first factor most significant.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep);

/// Matrix exponential by scaling and squaring with a Pade approximant.
ComplexMatrix expm(const ComplexMatrix& m);

struct HermitianEigenSystem {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first.
/// Each eigenvector is rotated so its largest-magnitude component is real
/// and positive (ties resolved toward the lowest index).
HermitianEigenSystem herm_eig(const ComplexMatrix& m);

/// Hilbert-Schmidt inner product Tr(a^dagger b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-major vectorization: stacks the columns of `m`.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, int rows, int cols);

/// Superoperator matrix of X -> a X b in the column-major vectorization,
/// i.e. b^T (x) a.
ComplexMatrix sandwich_superop(const ComplexMatrix& a, const ComplexMatrix& b);

/// Superoperator of the channel X -> sum_k K_k X K_k^dagger.
ComplexMatrix kraus_superop(std::span<const ComplexMatrix> kraus);

/// Apply a Kraus channel to a matrix.
ComplexMatrix apply_kraus(std::span<const ComplexMatrix> kraus, const ComplexMatrix& x);

/// Orthonormal basis of the null space of `m` (columns), using singular
/// values below rel_tol times the largest (or below abs floor 1e-14).
ComplexMatrix null_space(const ComplexMatrix& m, double rel_tol = 1e-9);

}  // namespace numkit
}  // namespace hmmqec

#endif  // HMMQEC_NUMKIT_HPP
