#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace stadium::oracle {

/// Row-major dense symmetric matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct DenseEigen {
  std::vector<double> values;                ///< ascending
  std::vector<std::vector<double>> vectors;  ///< unit columns matching values
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// tol times the matrix norm. Slow and simple; meant for small reference problems.
/// Dense 5-point Dirichlet Laplacian over an arbitrary node set with spacing h: nodes at
/// distance h are neighbours, anything missing counts as boundary. Built from coordinates
/// alone, without any lattice bookkeeping.
DenseMatrix dense_five_point(const std::vector<std::array<double, 2>>& nodes, double h);

DenseEigen jacobi_eigen(DenseMatrix m, double tol = 1e-14, std::size_t max_sweeps = 100);

}  // namespace stadium::oracle
