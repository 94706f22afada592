#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stadium/geometry.hpp"

namespace stadium {

/// Symmetric sparse matrix in CSR form with both triangles stored.
/// Column indices are ascending within each row.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> col_idx,
                  std::vector<double> values, double h);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  double h() const noexcept { return h_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Entry (i, j); zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
  double h_ = 0.0;
};

/// Masked five-point discretisation of -u_xx - u_yy with u = 0 outside the grid.
///
/// Lattice neighbours that are interior nodes couple with -1/h^2; neighbours outside
/// the domain are dropped. On quadrant grids a neighbour across a symmetry axis is the
/// node's own mirror image and is folded into the diagonal: -1/h^2 for even parity,
/// +1/h^2 for odd parity.
SparseSymMatrix assemble_laplacian(const Grid& grid);

/// y = M x. Throws DimensionError on size mismatch.
std::vector<double> matvec(const SparseSymMatrix& m, std::span<const double> x);
void matvec(const SparseSymMatrix& m, std::span<const double> x, std::span<double> y);

/// MatrixMarket "coordinate real symmetric" dump (lower triangle, 1-based).
void write_matrix_market(const SparseSymMatrix& m, std::ostream& out);

}  // namespace stadium
