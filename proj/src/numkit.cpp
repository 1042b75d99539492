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

#include "orbit_tracer/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "orbit_tracer/error.hpp"

namespace orbit_tracer::numkit {

namespace {

void require_square(const RealMatrix& M, const char* who) {
  if (M.rows() == 0 || M.rows() != M.cols()) {
    fail(ErrorKind::InvalidArgument, std::string(who) + ": matrix must be square and non-empty");
  }
  if (!all_finite(M)) fail(ErrorKind::InvalidArgument, std::string(who) + ": non-finite entry");
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gauss_solve(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M,
                                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x,
                                                     const char* who) {
  const Eigen::Index n = M.rows();
  if (n == 0 || M.cols() != n || x.size() != n) {
    fail(ErrorKind::InvalidArgument, std::string(who) + ": dimension mismatch");
  }
  const double scale = M.cwiseAbs().maxCoeff();
  const double threshold = 1e-12 * scale;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(M(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(M(r, col)) > best) {
        best = std::abs(M(r, col));
        pivot = r;
      }
    }
    if (!(best > threshold)) {
      std::ostringstream os;
      os << who << ": singular matrix (pivot " << best << " at column " << col << ")";
      fail(ErrorKind::Numerical, os.str());
    }
    if (pivot != col) {
      M.row(pivot).swap(M.row(col));
      std::swap(x(pivot), x(col));
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar f = M(r, col) / M(col, col);
      if (f == Scalar(0)) continue;
      M.row(r).tail(n - col) -= f * M.row(col).tail(n - col);
      x(r) -= f * x(col);
    }
  }
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    Scalar acc = x(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= M(r, c) * x(c);
    x(r) = acc / M(r, r);
  }
  return x;
}

}  // namespace

double max_abs(const RealMatrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

bool all_finite(const RealMatrix& M) { return M.allFinite(); }

RealMatrix solve_lyapunov(const RealMatrix& A, const RealMatrix& S) {
  require_square(A, "lyapunov");
  require_square(S, "lyapunov");
  const Eigen::Index n = A.rows();
  if (S.rows() != n) fail(ErrorKind::InvalidArgument, "lyapunov: A and S differ in size");
  if (!hurwitz_check(A)) fail(ErrorKind::Numerical, "lyapunov: A not Hurwitz");
  if (max_abs(S - S.transpose()) > 1e-12 * std::max(1.0, max_abs(S))) {
    fail(ErrorKind::InvalidArgument, "lyapunov: S not symmetric");
  }
  if (eig_sym(S).front() <= 0.0) fail(ErrorKind::InvalidArgument, "lyapunov: S not positive-definite");

  // Column-major vec: vec(P A) = (A^T kron I) vec(P), vec(A^T P) = (I kron A^T) vec(P).
  const Eigen::Index nn = n * n;
  RealMatrix K = RealMatrix::Zero(nn, nn);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // block (i, j) of A^T kron I is A(j, i) * I
      K.block(i * n, j * n, n, n).diagonal().array() += A(j, i);
    }
    K.block(i * n, i * n, n, n) += A.transpose();
  }
  RealVector rhs = -Eigen::Map<const RealVector>(S.data(), nn);
  RealVector vecP;
  try {
    vecP = solve_real(K, rhs);
  } catch (const Error&) {
    fail(ErrorKind::Numerical, "lyapunov: singular Kronecker system");
  }
  RealMatrix P = Eigen::Map<RealMatrix>(vecP.data(), n, n);
  P = (0.5 * (P + P.transpose())).eval();
  return P;
}

SymmetricEigen eig_sym_decompose(const RealMatrix& M) {
  require_square(M, "eig_sym");
  const Eigen::Index n = M.rows();
  const double scale = std::max(1.0, max_abs(M));
  if (max_abs(M - M.transpose()) > 1e-12 * scale) {
    fail(ErrorKind::InvalidArgument, "eig_sym: matrix not symmetric");
  }
  RealMatrix a = 0.5 * (M + M.transpose());
  RealMatrix v = RealMatrix::Identity(n, n);
  const double tol = 1e-12;
  const int sweep_cap = 50;
  const double total = a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < sweep_cap && off_norm() > tol * std::max(total, 1e-300); ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > 1e-9 * std::max(total, 1e-300)) {
    fail(ErrorKind::NonConvergence, "eig_sym: Jacobi sweep cap reached");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{RealVector(n), RealMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

std::vector<double> eig_sym(const RealMatrix& M) {
  const auto d = eig_sym_decompose(M);
  return {d.values.data(), d.values.data() + d.values.size()};
}

std::vector<Complex> eig_general(const RealMatrix& M) {
  require_square(M, "eig_general");
  const Eigen::Index n = M.rows();
  if (n > 8) fail(ErrorKind::InvalidArgument, "eig_general: dimension above 8");
  Eigen::EigenSolver<RealMatrix> solver;
  solver.setMaxIterations(30 * n);
  solver.compute(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_general: QR iteration did not converge within " << 30 * n
       << " iterations (n=" << n << ", max|M|=" << max_abs(M) << ")";
    fail(ErrorKind::NonConvergence, os.str());
  }
  const auto& ev = solver.eigenvalues();
  std::vector<Complex> out(ev.data(), ev.data() + ev.size());
  // Exact conjugate pairing for downstream consumers.
  for (auto& z : out) {
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0.0);
  }
  return out;
}

bool hurwitz_check(const RealMatrix& A) {
  const auto ev = eig_general(A);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& z : ev) worst = std::max(worst, z.real());
  return worst < -1e-12;
}

ComplexVector solve_complex(const ComplexMatrix& M, const ComplexVector& rhs) {
  if (!M.allFinite() || !rhs.allFinite()) fail(ErrorKind::InvalidArgument, "solve_complex: non-finite input");
  return gauss_solve<Complex>(M, rhs, "solve_complex");
}

RealVector solve_real(const RealMatrix& M, const RealVector& rhs) {
  if (!M.allFinite() || !rhs.allFinite()) fail(ErrorKind::InvalidArgument, "solve_real: non-finite input");
  return gauss_solve<double>(M, rhs, "solve_real");
}

}  // namespace orbit_tracer::numkit
