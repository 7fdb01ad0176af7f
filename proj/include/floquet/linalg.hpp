#pragma once

// Small dense linear algebra on complex matrices. Everything here operates on
// the m x m Bloch matrices (m = number of cell vertices) or on the moderately
// sized polynomial-space systems, so the routines favour determinism and
// predictable tolerances over raw speed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "floquet/error.hpp"

namespace floquet {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx I{0.0, 1.0};

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues, columns
/// of `vectors` are the matching orthonormal eigenvectors.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
  int sweeps = 0;
};

/// Cyclic complex Jacobi. Sweeps visit (p, q) pairs in row-major order and
/// stop once the off-diagonal Frobenius mass drops below threshold * |A|_F.
inline HermitianEigen jacobi_eigen(const CMatrix& input, double threshold = 1e-14,
                                   int max_sweeps = 100) {
  const Eigen::Index m = input.rows();
  if (input.cols() != m) fail(ErrorKind::precondition, "jacobi_eigen: matrix is not square");

  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::Identity(m, m);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > threshold * scale; ++sweep) {
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= std::numeric_limits<double>::min()) continue;
        const cplx phase = a(p, q) / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
        const cplx gpp = c;
        const cplx gpq = s;
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);
        for (Eigen::Index i = 0; i < m; ++i) {
          const cplx aip = a(i, p);
          const cplx aiq = a(i, q);
          a(i, p) = aip * gpp + aiq * gqp;
          a(i, q) = aip * gpq + aiq * gqq;
          const cplx vip = v(i, p);
          const cplx viq = v(i, q);
          v(i, p) = vip * gpp + viq * gqp;
          v(i, q) = vip * gpq + viq * gqq;
        }
        for (Eigen::Index j = 0; j < m; ++j) {
          const cplx apj = a(p, j);
          const cplx aqj = a(q, j);
          a(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
          a(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  HermitianEigen out;
  out.values.resize(m);
  out.vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  out.sweeps = sweep;
  return out;
}

/// Singular values, descending.
inline RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector{};
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

inline double min_singular_value(const CMatrix& a) {
  const RVector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

inline double spectral_norm(const CMatrix& a) {
  const RVector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Eigenvalues of a general complex matrix (unordered).
inline CVector complex_eigenvalues(const CMatrix& a) {
  if (a.size() == 0) return CVector{};
  Eigen::ComplexEigenSolver<CMatrix> solver(a, false);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::numerical, "complex eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

/// Result of a rank-revealing elimination.
struct KernelBasis {
  Eigen::Index rank = 0;
  CMatrix basis;  ///< columns span the null space
};

/// Null space by Gauss-Jordan elimination with complete pivoting. A pivot is
/// accepted while it exceeds rel_tol times the largest pivot seen (the first)
/// and also abs_floor. Basis vectors carry a 1 in one free column and zeros in the other free
/// columns, so they are deterministic given the matrix.
inline KernelBasis null_space(const CMatrix& input, double rel_tol = 1e-10, double abs_floor = 0.0) {
  CMatrix a = input;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  std::vector<Eigen::Index> pivot_col;
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  double first_pivot = 0.0;

  for (Eigen::Index k = 0; k < std::min(rows, cols); ++k) {
    Eigen::Index best_r = -1;
    Eigen::Index best_c = -1;
    double best = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (is_pivot[static_cast<std::size_t>(c)]) continue;
      for (Eigen::Index r = k; r < rows; ++r) {
        const double mag = std::abs(a(r, c));
        if (mag > best) {
          best = mag;
          best_r = r;
          best_c = c;
        }
      }
    }
    if (k == 0) first_pivot = best;
    if (best_r < 0 || best <= rel_tol * first_pivot || best <= abs_floor || best == 0.0) break;
    a.row(k).swap(a.row(best_r));
    a.row(k) /= a(k, best_c);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == k) continue;
      const cplx f = a(r, best_c);
      if (f != cplx{}) a.row(r) -= f * a.row(k);
    }
    pivot_col.push_back(best_c);
    is_pivot[static_cast<std::size_t>(best_c)] = true;
  }

  KernelBasis out;
  out.rank = static_cast<Eigen::Index>(pivot_col.size());
  out.basis = CMatrix::Zero(cols, cols - out.rank);
  Eigen::Index idx = 0;
  for (Eigen::Index f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    out.basis(f, idx) = 1.0;
    for (std::size_t k = 0; k < pivot_col.size(); ++k)
      out.basis(pivot_col[k], idx) = -a(static_cast<Eigen::Index>(k), f);
    ++idx;
  }
  return out;
}

inline Eigen::Index matrix_rank(const CMatrix& a, double rel_tol = 1e-10) {
  if (a.size() == 0) return 0;
  return null_space(a, rel_tol).rank;
}

/// Moore-Penrose pseudo-inverse (minimum-norm least-squares solution operator).
inline CMatrix pseudo_inverse(const CMatrix& a) {
  if (a.size() == 0) return CMatrix::Zero(a.cols(), a.rows());
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(a);
  return cod.pseudoInverse();
}

/// Orthonormal basis of the column space, via SVD; columns with singular value
/// below rel_tol * s_max are discarded.
inline CMatrix column_space(const CMatrix& a, double rel_tol = 1e-10) {
  if (a.size() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU);
  const RVector s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace floquet
