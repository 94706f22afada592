#include "stadium/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "stadium/error.hpp"
#include "stadium/rng.hpp"

namespace stadium {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr double kGramConditionLimit = 1e8;
constexpr double kDropRatio = 1e-10;
constexpr std::size_t kRefreshInterval = 20;

class Operator {
 public:
  explicit Operator(const SparseSymMatrix& m) : m_(m) {}

  Mat apply(const Mat& in) {
    Mat out(in.rows(), in.cols());
    const auto n = static_cast<std::size_t>(in.rows());
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
      matvec(m_, std::span<const double>(in.col(c).data(), n), std::span<double>(out.col(c).data(), n));
    }
    count_ += static_cast<std::size_t>(in.cols());
    return out;
  }

  std::size_t count() const noexcept { return count_; }

 private:
  const SparseSymMatrix& m_;
  std::size_t count_ = 0;
};

// Removes the span of the orthonormal block q from v (twice, for stability) and then
// orthonormalises the columns of v by modified Gram-Schmidt. Identical linear
// combinations are applied to av when given, so av stays equal to A v without new
// products. Columns that collapse below kDropRatio of their incoming norm are removed.
void orthonormalize(Mat& v, Mat* av, const Mat* q, const Mat* aq) {
  if (v.cols() == 0) return;
  Vec incoming = v.colwise().norm().transpose();
  if (q != nullptr && q->cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      const Mat coeff = q->transpose() * v;
      v.noalias() -= *q * coeff;
      if (av != nullptr) av->noalias() -= *aq * coeff;
    }
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i : keep) {
        const double c = v.col(i).dot(v.col(j));
        v.col(j) -= c * v.col(i);
        if (av != nullptr) av->col(j) -= c * av->col(i);
      }
    }
    const double norm = v.col(j).norm();
    if (!(norm > kDropRatio * incoming(j)) || !(norm > std::numeric_limits<double>::min())) continue;
    v.col(j) /= norm;
    if (av != nullptr) av->col(j) /= norm;
    keep.push_back(j);
  }
  if (static_cast<Eigen::Index>(keep.size()) == v.cols()) return;
  Mat vk(v.rows(), static_cast<Eigen::Index>(keep.size()));
  Mat avk;
  if (av != nullptr) avk.resize(av->rows(), vk.cols());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    vk.col(static_cast<Eigen::Index>(c)) = v.col(keep[c]);
    if (av != nullptr) avk.col(static_cast<Eigen::Index>(c)) = av->col(keep[c]);
  }
  v = std::move(vk);
  if (av != nullptr) *av = std::move(avk);
}

Mat random_block(Eigen::Index n, Eigen::Index cols, SplitMix64& rng) {
  Mat x(n, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = rng.symmetric_unit();
  }
  return x;
}

double condition_estimate(const Mat& gram) {
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

SolveResult finish(const SparseSymMatrix& m, const Mat& x, std::size_t k, double tol, SolveReport report) {
  SolveResult result;
  result.report = std::move(report);
  result.report.final_residuals.clear();
  bool converged = true;
  for (std::size_t c = 0; c < k; ++c) {
    EigenPair pair;
    Vec col = x.col(static_cast<Eigen::Index>(c));
    col /= col.norm();
    pair.vector.assign(col.data(), col.data() + col.size());
    const auto av = matvec(m, pair.vector);
    double rq = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) rq += pair.vector[i] * av[i];
    pair.lambda = rq;
    const double res = residual(m, pair);
    result.report.final_residuals.push_back(res);
    converged = converged && res <= tol * std::abs(pair.lambda);
    result.pairs.push_back(std::move(pair));
  }
  result.report.matvecs += 2 * k;
  result.report.converged = converged;
  return result;
}

SolveResult dense_solve(const SparseSymMatrix& m, std::size_t k, const SolveOptions& options) {
  const auto n = static_cast<Eigen::Index>(m.n());
  Mat a = Mat::Zero(n, n);
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) a(static_cast<Eigen::Index>(i), ci[e]) = v[e];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  SolveReport report;
  report.seed = options.seed;
  report.ritz_history.push_back(es.eigenvalues()(0));
  return finish(m, es.eigenvectors().leftCols(static_cast<Eigen::Index>(k)), k, options.tol, std::move(report));
}

}  // namespace

double residual(const SparseSymMatrix& m, const EigenPair& pair) {
  if (pair.vector.size() != m.n()) throw DimensionError("residual: dimension mismatch");
  const auto av = matvec(m, pair.vector);
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double r = av[i] - pair.lambda * pair.vector[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

SolveResult smallest_k(const SparseSymMatrix& m, std::size_t k, double tol, std::uint64_t seed) {
  SolveOptions options;
  options.tol = tol;
  options.seed = seed;
  return smallest_k(m, k, options);
}

SolveResult smallest_k(const SparseSymMatrix& m, std::size_t k, const SolveOptions& options) {
  const std::size_t n = m.n();
  if (k == 0 || k > n) throw DimensionError("smallest_k: need 1 <= k <= n");
  if (!(options.tol > 0.0) || options.tol > 1e-2) throw InvalidArgument("smallest_k: tol must be in (0, 1e-2]");

  const std::size_t guard = std::max<std::size_t>(2, (k + 3) / 4);
  const std::size_t block = std::min(n, k + guard);
  // The search space [X W P] would span everything: solve densely instead.
  if (3 * block >= n) return dense_solve(m, k, options);

  const double tol = options.tol;
  const std::size_t budget = options.max_matvecs > 0 ? options.max_matvecs : 10 * n * k;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(block);

  Vec inv_diag(rows);
  {
    const auto d = m.diagonal();
    for (Eigen::Index i = 0; i < rows; ++i) inv_diag(i) = 1.0 / d[static_cast<std::size_t>(i)];
  }

  Operator op(m);
  SolveReport report;
  report.seed = options.seed;

  SplitMix64 rng(options.seed);
  Mat x = random_block(rows, cols, rng);
  orthonormalize(x, nullptr, nullptr, nullptr);
  while (x.cols() < cols) {
    Mat extra = random_block(rows, cols - x.cols(), rng);
    orthonormalize(extra, nullptr, &x, &x);
    Mat joined(rows, x.cols() + extra.cols());
    joined << x, extra;
    x = std::move(joined);
  }
  Mat ax = op.apply(x);
  Vec lambda;
  {
    Mat h = x.transpose() * ax;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    x = x * es.eigenvectors();
    ax = ax * es.eigenvectors();
    lambda = es.eigenvalues();
  }

  Mat p(rows, 0);
  Mat ap(rows, 0);
  std::vector<Eigen::Index> active;
  while (true) {
    report.ritz_history.push_back(lambda(0));
    Mat r = ax - x * lambda.asDiagonal();
    active.clear();
    bool wanted_converged = true;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const bool ok = r.col(c).norm() <= tol * std::abs(lambda(c));
      if (!ok) active.push_back(c);
      if (c < static_cast<Eigen::Index>(k)) wanted_converged = wanted_converged && ok;
    }
    if (wanted_converged) {
      // Confirm against exact products before stopping; accumulated updates can drift.
      ax = op.apply(x);
      r = ax - x * lambda.asDiagonal();
      bool confirmed = true;
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
        confirmed = confirmed && r.col(c).norm() <= tol * std::abs(lambda(c));
      }
      if (confirmed) break;
    }
    if (op.count() >= budget || active.empty()) break;
    ++report.iterations;

    Mat w(rows, static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) {
      w.col(static_cast<Eigen::Index>(c)) = r.col(active[c]).cwiseProduct(inv_diag);
    }
    orthonormalize(w, nullptr, &x, &ax);
    Mat aw = op.apply(w);

    if (p.cols() > 0) {
      Mat q(rows, x.cols() + w.cols());
      q << x, w;
      Mat aq(rows, q.cols());
      aq << ax, aw;
      orthonormalize(p, &ap, &q, &aq);
    }

    const Eigen::Index nw = w.cols();
    const Eigen::Index np = p.cols();
    Mat s(rows, cols + nw + np);
    Mat as(rows, s.cols());
    s.leftCols(cols) = x;
    s.middleCols(cols, nw) = w;
    s.rightCols(np) = p;
    as.leftCols(cols) = ax;
    as.middleCols(cols, nw) = aw;
    as.rightCols(np) = ap;

    Mat gram = s.transpose() * s;
    gram = 0.5 * (gram + gram.transpose()).eval();
    if (condition_estimate(gram) > kGramConditionLimit) {
      // Rebuild an orthonormal basis, dropping rank-deficient directions.
      orthonormalize(s, &as, nullptr, nullptr);
      gram = Mat::Identity(s.cols(), s.cols());
    }
    Mat h = s.transpose() * as;
    h = 0.5 * (h + h.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(h, gram);
    if (es.info() != Eigen::Success) break;
    const Mat c = es.eigenvectors().leftCols(cols);
    lambda = es.eigenvalues().head(cols);

    x = s * c;
    ax = as * c;
    // Conjugate directions: the W and P components of the active Ritz vectors.
    const Eigen::Index tail = s.cols() - cols;
    if (tail > 0) {
      Mat ct(tail, static_cast<Eigen::Index>(active.size()));
      for (std::size_t a = 0; a < active.size(); ++a) {
        ct.col(static_cast<Eigen::Index>(a)) = c.col(active[a]).tail(tail);
      }
      p = s.rightCols(tail) * ct;
      ap = as.rightCols(tail) * ct;
    } else {
      p.resize(rows, 0);
      ap.resize(rows, 0);
    }

    if (report.iterations % kRefreshInterval == 0) {
      ax = op.apply(x);
      if (p.cols() > 0) ap = op.apply(p);
    }
  }

  report.matvecs = op.count();
  return finish(m, x, k, tol, std::move(report));
}

}  // namespace stadium
