#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stadium/discretize.hpp"

namespace stadium {

struct EigenPair {
  double lambda = 0.0;
  /// Unit Euclidean norm coefficient vector over grid nodes.
  std::vector<double> vector;
};

struct SolveReport {
  std::size_t iterations = 0;
  std::size_t matvecs = 0;
  std::vector<double> final_residuals;
  bool converged = false;
  std::uint64_t seed = 0;
  /// Smallest Ritz value after each outer iteration.
  std::vector<double> ritz_history;
};

inline constexpr double kDefaultTolerance = 1e-7;
inline constexpr std::uint64_t kDefaultSeed = 20240229;

struct SolveOptions {
  double tol = kDefaultTolerance;
  std::uint64_t seed = kDefaultSeed;
  /// Matrix-vector product budget; 0 means 10 n per requested pair.
  std::size_t max_matvecs = 0;
};

struct SolveResult {
  std::vector<EigenPair> pairs;
  SolveReport report;
};

/// k smallest eigenpairs of a symmetric positive-definite matrix.
///
/// Blocked locally optimal preconditioned conjugate gradient (LOBPCG) with
/// k + max(2, ceil(k/4)) block vectors, a Jacobi preconditioner and a SplitMix64 seeded
/// start block. Pairs come back ascending in lambda. Hitting the matvec budget does not
/// throw: the best available pairs are returned with report.converged == false.
///
/// Throws DimensionError if k == 0 or k > n, InvalidArgument if tol is outside (0, 1e-2].
SolveResult smallest_k(const SparseSymMatrix& m, std::size_t k, const SolveOptions& options = {});
SolveResult smallest_k(const SparseSymMatrix& m, std::size_t k, double tol, std::uint64_t seed);

/// ||M v - lambda v||_2
double residual(const SparseSymMatrix& m, const EigenPair& pair);

}  // namespace stadium
