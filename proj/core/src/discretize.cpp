#include "stadium/discretize.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>

#include "stadium/error.hpp"

namespace stadium {

SparseSymMatrix::SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                                 std::vector<std::uint32_t> col_idx, std::vector<double> values, double h)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)), h_(h) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
    throw DimensionError("inconsistent CSR arrays");
  }
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw DimensionError("matrix index out of range");
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

SparseSymMatrix assemble_laplacian(const Grid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.h();
  const double scale = 1.0 / (h * h);
  const bool quadrant = grid.mode() == GridMode::Quadrant;
  // Ghost folding sign per axis: across y = 0 (neighbour j = -1) the mirror is the
  // reflection about the x-axis; across x = 0 (neighbour i = -1) the one about the y-axis.
  int fold_x = 0;
  int fold_y = 0;
  if (quadrant) {
    fold_x = parity(grid.spec().symmetry, Axis::X) == Parity::Even ? -1 : 1;
    fold_y = parity(grid.spec().symmetry, Axis::Y) == Parity::Even ? -1 : 1;
  }

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(5 * n);
  vals.reserve(5 * n);

  struct Entry {
    std::uint32_t col;
    int coeff;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const LatticeIndex node = grid.lattice(k);
    int diag = 4;
    std::array<Entry, 4> off{};
    std::size_t n_off = 0;
    const std::array<LatticeIndex, 4> neighbours{{{node.i, node.j - 1},
                                                  {node.i - 1, node.j},
                                                  {node.i + 1, node.j},
                                                  {node.i, node.j + 1}}};
    for (const auto& nb : neighbours) {
      if (const auto idx = grid.index_of(nb.i, nb.j)) {
        off[n_off++] = {static_cast<std::uint32_t>(*idx), -1};
      } else if (quadrant && nb.j == -1) {
        diag += fold_x;
      } else if (quadrant && nb.i == -1) {
        diag += fold_y;
      }
      // otherwise: exterior neighbour, Dirichlet mask
    }
    std::array<Entry, 5> row{};
    std::copy_n(off.begin(), n_off, row.begin());
    row[n_off] = {static_cast<std::uint32_t>(k), diag};
    std::sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n_off + 1),
              [](const Entry& a, const Entry& b) { return a.col < b.col; });
    for (std::size_t e = 0; e <= n_off; ++e) {
      cols.push_back(row[e].col);
      vals.push_back(row[e].coeff * scale);
    }
    row_ptr[k + 1] = cols.size();
  }
  return SparseSymMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals), h);
}

void matvec(const SparseSymMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.n() || y.size() != m.n()) throw DimensionError("matvec: dimension mismatch");
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  for (std::size_t i = 0; i < m.n(); ++i) {
    double acc = 0.0;
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) acc += v[e] * x[ci[e]];
    y[i] = acc;
  }
}

std::vector<double> matvec(const SparseSymMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.n());
  matvec(m, x, y);
  return y;
}

void write_matrix_market(const SparseSymMatrix& m, std::ostream& out) {
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  std::size_t lower = 0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) lower += ci[e] <= i ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.n() << ' ' << m.n() << ' ' << lower << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
      if (ci[e] > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v[e]);
      out << (i + 1) << ' ' << (ci[e] + 1) << ' ' << buf << '\n';
    }
  }
}

}  // namespace stadium
