// Copyright 2026 The orbit-tracer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ORBIT_TRACER_NUMKIT_HPP_
#define ORBIT_TRACER_NUMKIT_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace orbit_tracer::numkit {

// Small dense kernels. Every matrix in this project has n <= 8, so the
// algorithms favour simplicity over asymptotic cost.

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Solves P A + A^T P = -S for symmetric positive-definite P.
/// Throws if A is not Hurwitz or S is not symmetric positive-definite.
RealMatrix solve_lyapunov(const RealMatrix& A, const RealMatrix& S);

struct SymmetricEigen {
  RealVector values;   // ascending
  RealMatrix vectors;  // columns, orthonormal
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
SymmetricEigen eig_sym_decompose(const RealMatrix& M);

/// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> eig_sym(const RealMatrix& M);

/// All eigenvalues of a general real matrix (n <= 8); complex values come in
/// conjugate pairs.
std::vector<Complex> eig_general(const RealMatrix& M);

/// True iff every eigenvalue has real part below -1e-12.
bool hurwitz_check(const RealMatrix& A);

/// Gaussian elimination with partial pivoting. Throws on a pivot below
/// 1e-12 * max|M|.
ComplexVector solve_complex(const ComplexMatrix& M, const ComplexVector& rhs);
RealVector solve_real(const RealMatrix& M, const RealVector& rhs);

double max_abs(const RealMatrix& M);
bool all_finite(const RealMatrix& M);

}  // namespace orbit_tracer::numkit

#endif  // ORBIT_TRACER_NUMKIT_HPP_
