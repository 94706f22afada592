#include "stadium/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "stadium/error.hpp"

namespace stadium {

ScalarField::ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("field needs a grid");
  if (values_.size() != grid_->size()) throw DimensionError("field size does not match its grid");
}

namespace {

void require_same_grid(const ScalarField& u, const ScalarField& v) {
  if (u.grid_ptr() != v.grid_ptr()) throw GridMismatchError("fields live on different grids");
}

double weighted_dot(std::span<const double> a, std::span<const double> b, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return h * h * s;
}

double sign_of(Parity p) { return p == Parity::Even ? 1.0 : -1.0; }

}  // namespace

double inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v);
  return weighted_dot(u.values(), v.values(), u.grid().h());
}

double norm(const ScalarField& f) { return std::sqrt(weighted_dot(f.values(), f.values(), f.grid().h())); }

ScalarField normalize(const ScalarField& f) {
  const double n = norm(f);
  if (!(n > 0.0) || !std::isfinite(n)) throw ZeroFieldError("cannot normalise a zero field");
  std::vector<double> values(f.values().begin(), f.values().end());
  for (double& v : values) v /= n;
  return ScalarField(f.grid_ptr(), std::move(values));
}

ScalarField reflect(const ScalarField& f, Axis axis) {
  const Grid& grid = f.grid();
  if (!grid.reflection_closed()) throw NotReflectionClosedError("reflect needs a full-domain field");
  std::vector<double> values(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) values[k] = f[grid.reflected(k, axis)];
  return ScalarField(f.grid_ptr(), std::move(values));
}

SymmetryScore symmetry_scores(const ScalarField& f) {
  const Grid& grid = f.grid();
  if (!grid.reflection_closed()) throw NotReflectionClosedError("symmetry scores need a full-domain field");
  double ff = 0.0;
  double fx = 0.0;
  double fy = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    ff += f[k] * f[k];
    fx += f[k] * f[grid.reflected(k, Axis::X)];
    fy += f[k] * f[grid.reflected(k, Axis::Y)];
  }
  if (!(ff > 0.0)) throw ZeroFieldError("symmetry scores of a zero field");
  return {fx / ff, fy / ff};
}

SymmetryClass classify(const SymmetryScore& s, double threshold) {
  if (!(threshold > 0.5 && threshold < 1.0)) throw InvalidArgument("classify: threshold must be in (0.5, 1)");
  auto axis_parity = [threshold](double score) -> std::optional<Parity> {
    if (score >= threshold) return Parity::Even;
    if (score <= -threshold) return Parity::Odd;
    return std::nullopt;
  };
  const auto px = axis_parity(s.s_x);
  const auto py = axis_parity(s.s_y);
  if (!px || !py) return SymmetryClass::Ambiguous;
  return make_class(*px, *py);
}

ScalarField fix_sign(const ScalarField& f) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::abs(f[k]) > best_abs) {
      best_abs = std::abs(f[k]);
      best = k;
    }
  }
  if (!(best_abs > 0.0)) throw ZeroFieldError("fix_sign of a zero field");
  std::vector<double> values(f.values().begin(), f.values().end());
  if (f[best] < 0.0) {
    for (double& v : values) v = -v;
  }
  return ScalarField(f.grid_ptr(), std::move(values));
}

ScalarField combine(const ScalarField& u, const ScalarField& v, Combination sign) {
  require_same_grid(u, v);
  const double s = sign == Combination::Sum ? 1.0 : -1.0;
  std::vector<double> values(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) values[k] = (u[k] + s * v[k]) / std::sqrt(2.0);
  ScalarField mixed(u.grid_ptr(), std::move(values));
  if (norm(mixed) <= 1e-12 * (norm(u) + norm(v))) throw ZeroFieldError("combination cancels to zero");
  return fix_sign(normalize(mixed));
}

double sample_bilinear(const ScalarField& f, Point p) {
  const Grid& grid = f.grid();
  if (!grid.reflection_closed()) throw InvalidArgument("bilinear sampling needs a full-domain field");
  if (!contains(grid.geometry(), p)) return 0.0;
  const double h = grid.h();
  auto split = [](double s, int& base, double& t) {
    base = static_cast<int>(std::floor(s));
    t = s - base;
    if (t < 1e-12) {
      t = 0.0;
    } else if (t > 1.0 - 1e-12) {
      ++base;
      t = 0.0;
    }
  };
  int i0 = 0;
  int j0 = 0;
  double tx = 0.0;
  double ty = 0.0;
  split(p.x / h - 0.5, i0, tx);
  split(p.y / h - 0.5, j0, ty);
  auto at = [&](int i, int j) {
    const auto k = grid.index_of(i, j);
    return k ? f[*k] : 0.0;
  };
  double value = (1.0 - tx) * (1.0 - ty) * at(i0, j0);
  if (tx > 0.0) value += tx * (1.0 - ty) * at(i0 + 1, j0);
  if (ty > 0.0) value += (1.0 - tx) * ty * at(i0, j0 + 1);
  if (tx > 0.0 && ty > 0.0) value += tx * ty * at(i0 + 1, j0 + 1);
  return value;
}

double overlap(const ScalarField& u, const ScalarField& v) {
  if (!u.grid().reflection_closed() || !v.grid().reflection_closed()) {
    throw InvalidArgument("overlap needs full-domain fields");
  }
  const auto points = u.grid().points();
  const double h = u.grid().h();
  double s = 0.0;
  if (u.grid_ptr() == v.grid_ptr()) {
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * sample_bilinear(v, points[k]);
  }
  return h * h * s;
}

SwapMatrix swap_diagnostic(const std::array<ScalarField, 2>& before, const std::array<ScalarField, 2>& after) {
  SwapMatrix s{};
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t q = 0; q < 2; ++q) s[p][q] = std::abs(overlap(before[p], after[q]));
  }
  return s;
}

bool is_swapped(const SwapMatrix& s) noexcept {
  const double diag = std::max(s[0][0], s[1][1]);
  return s[0][1] > diag && s[1][0] > diag;
}

ScalarField field_from_eigenvector(std::shared_ptr<const Grid> grid, std::span<const double> vector) {
  return fix_sign(normalize(ScalarField(std::move(grid), std::vector<double>(vector.begin(), vector.end()))));
}

ScalarField unfold_quadrant(const ScalarField& quadrant_field, std::shared_ptr<const Grid> full) {
  const Grid& quad = quadrant_field.grid();
  if (quad.mode() != GridMode::Quadrant) throw InvalidArgument("unfold_quadrant needs a quadrant field");
  if (!full || full->mode() != GridMode::FullDomain) throw InvalidArgument("unfold target must be a full grid");
  if (quad.h() != full->h() || quad.geometry() != full->geometry()) {
    throw GridMismatchError("quadrant and full grids describe different discretisations");
  }
  const SymmetryClass cls = quad.spec().symmetry;
  const double sx = sign_of(parity(cls, Axis::X));
  const double sy = sign_of(parity(cls, Axis::Y));
  std::vector<double> values(full->size());
  for (std::size_t k = 0; k < full->size(); ++k) {
    const LatticeIndex n = full->lattice(k);
    double s = 1.0;
    int i = n.i;
    int j = n.j;
    if (i < 0) {
      i = -1 - i;
      s *= sy;
    }
    if (j < 0) {
      j = -1 - j;
      s *= sx;
    }
    const auto q = quad.index_of(i, j);
    if (!q) throw GridMismatchError("full grid node has no quadrant counterpart");
    values[k] = s * quadrant_field[*q];
  }
  return fix_sign(normalize(ScalarField(std::move(full), std::move(values))));
}

ScalarField project_symmetry(const ScalarField& f, SymmetryClass cls) {
  const Grid& grid = f.grid();
  if (!grid.reflection_closed()) throw NotReflectionClosedError("projection needs a full-domain field");
  const double sx = sign_of(parity(cls, Axis::X));
  const double sy = sign_of(parity(cls, Axis::Y));
  std::vector<double> values(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::size_t kx = grid.reflected(k, Axis::X);
    const std::size_t ky = grid.reflected(k, Axis::Y);
    const std::size_t kxy = grid.reflected(kx, Axis::Y);
    values[k] = 0.25 * (f[k] + sx * f[kx] + sy * f[ky] + sx * sy * f[kxy]);
  }
  return ScalarField(f.grid_ptr(), std::move(values));
}

namespace {

// Splits the span of a degenerate cluster into symmetry-definite pieces. Returns an
// empty vector when the projected ranks do not add up to the cluster size (the cluster
// is not an invariant subspace to working accuracy).
std::vector<ClassifiedMode> rediagonalize(const std::vector<ScalarField>& cluster, const SparseSymMatrix& matrix,
                                          double threshold) {
  const auto d = static_cast<Eigen::Index>(cluster.size());
  std::vector<ClassifiedMode> out;
  for (SymmetryClass cls : kDefiniteClasses) {
    std::vector<ScalarField> projected;
    for (const auto& f : cluster) projected.push_back(project_symmetry(f, cls));
    Eigen::MatrixXd gram(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) gram(a, b) = inner(projected[a], projected[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    for (Eigen::Index e = 0; e < d; ++e) {
      if (es.eigenvalues()(e) < 0.5) continue;
      std::vector<double> values(cluster.front().size(), 0.0);
      for (Eigen::Index a = 0; a < d; ++a) {
        const double c = es.eigenvectors()(a, e);
        const auto pv = projected[static_cast<std::size_t>(a)].values();
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += c * pv[k];
      }
      const auto av = matvec(matrix, values);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        num += values[k] * av[k];
        den += values[k] * values[k];
      }
      ScalarField field = fix_sign(normalize(ScalarField(cluster.front().grid_ptr(), std::move(values))));
      const SymmetryScore score = symmetry_scores(field);
      out.push_back({num / den, classify(score, threshold), score, std::move(field)});
    }
  }
  if (static_cast<Eigen::Index>(out.size()) != d) return {};
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace

std::vector<ClassifiedMode> classify_modes(std::shared_ptr<const Grid> grid, const std::vector<EigenPair>& pairs,
                                           const SparseSymMatrix& matrix, double tol, double threshold) {
  std::vector<ClassifiedMode> modes;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() &&
           pairs[end].lambda - pairs[end - 1].lambda < 10.0 * tol * std::abs(pairs[end - 1].lambda)) {
      ++end;
    }
    std::vector<ClassifiedMode> plain;
    bool ambiguous = false;
    for (std::size_t i = start; i < end; ++i) {
      ScalarField field = field_from_eigenvector(grid, pairs[i].vector);
      const SymmetryScore score = symmetry_scores(field);
      const SymmetryClass cls = classify(score, threshold);
      ambiguous = ambiguous || cls == SymmetryClass::Ambiguous;
      plain.push_back({pairs[i].lambda, cls, score, std::move(field)});
    }
    if (ambiguous && end - start > 1) {
      std::vector<ScalarField> cluster;
      for (const auto& m : plain) cluster.push_back(m.field);
      auto split = rediagonalize(cluster, matrix, threshold);
      if (!split.empty()) plain = std::move(split);
    }
    for (auto& m : plain) modes.push_back(std::move(m));
    start = end;
  }
  return modes;
}

}  // namespace stadium
