#include "stadium/oracle/dense_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stadium::oracle {

namespace {

double off_norm2(const DenseMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (i != j) s += m(i, j) * m(i, j);
    }
  }
  return s;
}

}  // namespace

DenseMatrix dense_five_point(const std::vector<std::array<double, 2>>& nodes, double h) {
  DenseMatrix m(nodes.size());
  const double s = 1.0 / (h * h);
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    m(p, p) = 4.0 * s;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      if (p == q) continue;
      const double d = std::hypot(nodes[p][0] - nodes[q][0], nodes[p][1] - nodes[q][1]);
      if (std::abs(d - h) < 1e-9 * h) m(p, q) = -s;
    }
  }
  return m;
}

DenseEigen jacobi_eigen(DenseMatrix m, double tol, std::size_t max_sweeps) {
  const std::size_t n = m.n;
  DenseMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double total = std::sqrt(std::inner_product(m.a.begin(), m.a.end(), m.a.begin(), 0.0));

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    if (std::sqrt(off_norm2(m)) <= tol * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // Rutishauser's stable form
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m(x, x) < m(y, y); });
  DenseEigen out;
  for (std::size_t idx : order) {
    out.values.push_back(m(idx, idx));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

}  // namespace stadium::oracle
