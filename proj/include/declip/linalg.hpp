#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "declip/errors.hpp"

namespace declip {

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are tiny (agents <= 64, dims at desk
// scale), so no BLAS backing is warranted.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diag(const Vec& d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec matvec(const Matrix& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.cols) throw DimensionMismatchError("matvec size mismatch");
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
// Off-diagonal Frobenius norm is driven below `tol`; the rotation budget is
// 10*n^2 (about twenty sweeps), after which NumericalFailure is thrown.
std::vector<double> jacobi_eigenvalues(const Matrix& sym, double tol = 1e-12);

// Solve A x = b for symmetric positive definite A by Gaussian elimination
// with partial pivoting. Throws NumericalFailure on a (near-)singular pivot.
Vec solve_linear(Matrix a, Vec b);

}  // namespace declip
