#pragma once

// Lowest eigenpairs of a large real symmetric operator. Thick-restart Lanczos
// with full (two-pass classical Gram-Schmidt) reorthogonalization and locking:
// converged Ritz pairs are moved out of the Krylov basis and projected out of
// every new vector, which also picks up degenerate partners one by one.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "srpt/units.hpp"

namespace srpt::lanczos {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Options {
  double tol = 1e-9;         // residual bound relative to the operator scale
  int max_krylov = 80;       // basis size before a restart
  int keep = 0;              // Ritz vectors kept on restart (0 = max_krylov/3)
  long max_matvecs = 200000;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct Eigenpairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // unit columns
  std::vector<double> residuals;  // ||Hx - lambda x||
  double scale = 0.0;
  long matvecs = 0;
  int restarts = 0;
};

/// Infinity norm; an upper bound on the spectral radius.
inline double operator_scale(const SparseMatrix& h) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) row += std::abs(it.value());
    s = std::max(s, row);
  }
  return s;
}

/// `apply(x, y)` must set y = H x. `scale` bounds ||H||; the convergence test is
/// ||H x - theta x|| <= tol * scale, checked on the explicit residual.
template <class Apply>
Eigenpairs lowest_eigenpairs(Apply&& apply, Eigen::Index n, double scale, int k, const Options& o = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  if (k < 1) throw ConfigError("at least one eigenpair must be requested");
  if (n < k) throw ConfigError("more eigenpairs requested than the matrix dimension");
  if (o.max_krylov < 3) throw ConfigError("Krylov basis must hold at least three vectors");
  if (!(scale > 0.0)) scale = 1.0;

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const double bound = o.tol * scale;
  const int m = static_cast<int>(std::min<Eigen::Index>(o.max_krylov, n));
  const int keep_default = o.keep > 0 ? o.keep : std::max(1, m / 3);

  Eigenpairs out;
  out.scale = scale;
  MatrixXd locked(n, k);
  std::vector<double> locked_values;
  MatrixXd V(n, m + 1);
  MatrixXd T = MatrixXd::Zero(m, m);
  VectorXd w(n), x(n), r(n);
  int nl = 0;

  auto matvec = [&](const VectorXd& in, VectorXd& result) {
    apply(in, result);
    if (++out.matvecs > o.max_matvecs)
      throw ConvergenceError("Lanczos did not converge within " + std::to_string(o.max_matvecs) + " products");
  };
  auto deflate = [&](VectorXd& v) {
    if (nl == 0) return;
    for (int pass = 0; pass < 2; ++pass) v -= locked.leftCols(nl) * (locked.leftCols(nl).transpose() * v);
  };
  // Fresh unit vector orthogonal to the locked set and the first `cols` basis vectors.
  auto random_direction = [&](int cols) -> bool {
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) w(i) = uniform(rng);
      deflate(w);
      for (int pass = 0; pass < 2 && cols > 0; ++pass) w -= V.leftCols(cols) * (V.leftCols(cols).transpose() * w);
      const double norm = w.norm();
      if (norm > 1e-8) {
        V.col(cols) = w / norm;
        return true;
      }
    }
    return false;
  };

  if (!random_direction(0)) throw ConvergenceError("could not build a Lanczos start vector");
  int cur = 0;
  double last_beta = 0.0;
  for (;;) {
    const int m_eff = static_cast<int>(std::min<Eigen::Index>(m, n - nl));
    bool exhausted = false;
    while (cur < m_eff) {
      matvec(V.col(cur), w);
      const double w0 = w.norm();
      deflate(w);
      VectorXd h = V.leftCols(cur + 1).transpose() * w;
      w -= V.leftCols(cur + 1) * h;
      const VectorXd h2 = V.leftCols(cur + 1).transpose() * w;
      w -= V.leftCols(cur + 1) * h2;
      h += h2;
      deflate(w);
      for (int i = 0; i <= cur; ++i) T(i, cur) = T(cur, i) = h(i);
      last_beta = w.norm();
      ++cur;
      if (cur + nl >= n) {
        exhausted = true;
        break;
      }
      if (last_beta > 1e-14 * scale) {
        V.col(cur) = w / last_beta;
        if (last_beta < 1e-6 * w0) {
          // Heavy cancellation: one more pass keeps the new vector orthogonal.
          x = V.col(cur);
          deflate(x);
          x -= V.leftCols(cur) * (V.leftCols(cur).transpose() * x);
          V.col(cur) = x.normalized();
        }
      } else {
        // Invariant subspace found; continue in a fresh orthogonal direction.
        last_beta = 0.0;
        if (!random_direction(cur)) {
          exhausted = true;
          break;
        }
      }
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T.topLeftCorner(cur, cur));
    if (es.info() != Eigen::Success) throw ConvergenceError("projected eigenproblem failed");
    const VectorXd& theta = es.eigenvalues();
    const MatrixXd& S = es.eigenvectors();

    int nconv = 0;
    while (nl < k && nconv < cur) {
      const double estimate = std::abs(last_beta * S(cur - 1, nconv));
      if (estimate > bound) break;
      x = V.leftCols(cur) * S.col(nconv);
      deflate(x);
      x.normalize();
      matvec(x, r);
      const double rq = x.dot(r);
      r -= rq * x;
      const double res = r.norm();
      if (res > bound) break;
      locked.col(nl) = x;
      locked_values.push_back(rq);
      out.residuals.push_back(res);
      ++nl;
      ++nconv;
    }
    if (nl == k) break;
    if (exhausted && nconv == 0)
      throw ConvergenceError("Krylov space exhausted before the requested eigenpairs converged");

    // Thick restart from the lowest unconverged Ritz vectors plus the residual direction.
    const int m_next = static_cast<int>(std::min<Eigen::Index>(m, n - nl));
    int keep = std::min({keep_default + (k - nl), cur - nconv, m_next - 1});
    keep = std::max(keep, 0);
    const MatrixXd kept = V.leftCols(cur) * S.middleCols(nconv, keep);
    const VectorXd next = V.col(cur);
    const bool next_valid = !exhausted;
    V.leftCols(keep) = kept;
    T.setZero();
    for (int i = 0; i < keep; ++i) T(i, i) = theta(nconv + i);
    cur = keep;
    if (next_valid) {
      w = next;
      deflate(w);
      V.col(cur) = w.normalized();
    } else if (!random_direction(cur)) {
      throw ConvergenceError("could not extend the Krylov basis after restart");
    }
    ++out.restarts;
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return locked_values[a] < locked_values[b]; });
  out.values.resize(k);
  out.vectors.resize(n, k);
  std::vector<double> res(k);
  for (int i = 0; i < k; ++i) {
    out.values(i) = locked_values[order[i]];
    out.vectors.col(i) = locked.col(order[i]);
    res[i] = out.residuals[order[i]];
  }
  out.residuals = res;
  return out;
}

inline Eigenpairs lowest_eigenpairs(const SparseMatrix& h, int k, const Options& o = {}) {
  if (h.rows() != h.cols()) throw ConfigError("matrix must be square");
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& result) { result.noalias() = h * in; };
  return lowest_eigenpairs(apply, h.rows(), operator_scale(h), k, o);
}

}  // namespace srpt::lanczos
