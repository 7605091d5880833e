#include "pdearena/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "pdearena/errors.hpp"

namespace pdearena {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double SparseMatrix::at(int row, int col) const {
  const int b = row_offsets[row], e = row_offsets[row + 1];
  auto it = std::lower_bound(column_indices.begin() + b,
                             column_indices.begin() + e, col);
  if (it == column_indices.begin() + e || *it != col) return 0.0;
  return values[it - column_indices.begin()];
}

double* SparseMatrix::find(int row, int col) {
  const int b = row_offsets[row], e = row_offsets[row + 1];
  auto it = std::lower_bound(column_indices.begin() + b,
                             column_indices.begin() + e, col);
  if (it == column_indices.begin() + e || *it != col) return nullptr;
  return values.data() + (it - column_indices.begin());
}

SparseMatrix CsrBuilder::compress() {
  SparseMatrix a;
  a.n = static_cast<int>(adj_.size());
  a.row_offsets.resize(a.n + 1, 0);
  for (int r = 0; r < a.n; ++r) {
    auto& row = adj_[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    a.row_offsets[r + 1] = a.row_offsets[r] + static_cast<int>(row.size());
  }
  a.column_indices.reserve(a.row_offsets[a.n]);
  for (auto& row : adj_)
    a.column_indices.insert(a.column_indices.end(), row.begin(), row.end());
  a.values.assign(a.column_indices.size(), 0.0);
  return a;
}

void csr_add(SparseMatrix& a, int row, int col, double value) {
  double* p = a.find(row, col);
  assert(p && "entry outside assembled sparsity pattern");
  *p += value;
}

void spmv_into(const SparseMatrix& a, std::span<const double> x,
               std::span<double> y) {
  if (static_cast<int>(x.size()) != a.n || static_cast<int>(y.size()) != a.n)
    throw InvalidArgument("spmv: dimension mismatch");
  for (int r = 0; r < a.n; ++r) {
    double s = 0.0;
    for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
      s += a.values[k] * x[a.column_indices[k]];
    y[r] = s;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n);
  spmv_into(a, x, y);
  return y;
}

IluFactors ilu0_factor(const SparseMatrix& a) {
  IluFactors f;
  f.pattern = &a;
  f.values = a.values;
  f.diag.resize(a.n, -1);
  for (int r = 0; r < a.n; ++r)
    for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
      if (a.column_indices[k] == r) f.diag[r] = k;

  // IKJ variant restricted to the existing pattern.
  for (int i = 0; i < a.n; ++i) {
    for (int kk = a.row_offsets[i]; kk < a.row_offsets[i + 1]; ++kk) {
      const int k = a.column_indices[kk];
      if (k >= i) break;
      if (f.diag[k] < 0 || f.values[f.diag[k]] == 0.0)
        throw FactorizationBreakdown(
            "ilu0: zero pivot in row " + std::to_string(k), k);
      const double lik = f.values[kk] / f.values[f.diag[k]];
      f.values[kk] = lik;
      // subtract lik * U(k, j) for j > k within row i's pattern
      int pi = kk + 1;
      int pk = f.diag[k] + 1;
      const int ei = a.row_offsets[i + 1], ek = a.row_offsets[k + 1];
      while (pi < ei && pk < ek) {
        const int ci = a.column_indices[pi], ck = a.column_indices[pk];
        if (ci == ck) {
          f.values[pi] -= lik * f.values[pk];
          ++pi;
          ++pk;
        } else if (ci < ck) {
          ++pi;
        } else {
          ++pk;
        }
      }
    }
    if (f.diag[i] < 0 || f.values[f.diag[i]] == 0.0)
      throw FactorizationBreakdown(
          "ilu0: zero pivot in row " + std::to_string(i), i);
  }
  return f;
}

void IluFactors::apply(std::span<const double> r, std::span<double> x) const {
  const SparseMatrix& a = *pattern;
  // forward solve L y = r (unit diagonal)
  for (int i = 0; i < a.n; ++i) {
    double s = r[i];
    for (int k = a.row_offsets[i]; k < diag[i]; ++k)
      s -= values[k] * x[a.column_indices[k]];
    x[i] = s;
  }
  // backward solve U x = y
  for (int i = a.n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = diag[i] + 1; k < a.row_offsets[i + 1]; ++k)
      s -= values[k] * x[a.column_indices[k]];
    x[i] = s / values[diag[i]];
  }
}

SolveResult cg_solve(const SparseMatrix& a, std::span<const double> b,
                     const IluFactors* precond, double tol, int max_iter) {
  const int n = a.n;
  if (static_cast<int>(b.size()) != n)
    throw InvalidArgument("cg_solve: dimension mismatch");
  SolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), ap(n);
  if (precond)
    precond->apply(r, z);
  else
    z = r;
  p = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);

  for (int it = 1; it <= max_iter; ++it) {
    spmv_into(a, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0) || !std::isfinite(pap))
      throw SolverFailure("cg: matrix not positive definite on search space",
                          std::move(res.x), it, rnorm / bnorm);
    const double alpha = rz / pap;
    axpy(alpha, p, res.x);
    axpy(-alpha, ap, r);
    rnorm = norm2(r);
    if (std::isnan(rnorm))
      throw SolverFailure("cg: NaN residual", std::move(res.x), it,
                          std::numeric_limits<double>::quiet_NaN());
    if (rnorm <= tol * bnorm) {
      res.iterations = it;
      res.relative_residual = rnorm / bnorm;
      return res;
    }
    if (precond)
      precond->apply(r, z);
    else
      z = r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverFailure("cg: no convergence within max iterations",
                      std::move(res.x), max_iter, rnorm / bnorm);
}

SolveResult gmres_solve(const SparseMatrix& a, std::span<const double> b,
                        const IluFactors* precond, double tol, int restart,
                        int max_iter) {
  const int n = a.n;
  if (static_cast<int>(b.size()) != n)
    throw InvalidArgument("gmres_solve: dimension mismatch");
  if (restart < 1) throw InvalidArgument("gmres_solve: restart must be >= 1");
  SolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;
  const int m = std::min(restart, n);

  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), w(n), tmp(n);
  int total_iters = 0;

  auto true_rel_residual = [&](const std::vector<double>& x) {
    spmv_into(a, x, tmp);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = b[i] - tmp[i];
      s += d * d;
    }
    return std::sqrt(s) / bnorm;
  };

  while (total_iters < max_iter) {
    // residual of the current iterate, preconditioned
    spmv_into(a, res.x, tmp);
    for (int i = 0; i < n; ++i) w[i] = b[i] - tmp[i];
    if (precond) {
      precond->apply(w, v[0]);
    } else {
      v[0] = w;
    }
    double beta = norm2(v[0]);
    if (beta == 0.0) {
      res.relative_residual = true_rel_residual(res.x);
      return res;
    }
    for (int i = 0; i < n; ++i) v[0][i] /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;
    for (; k < m && total_iters < max_iter; ++k, ++total_iters) {
      // w = M^{-1} A v_k
      spmv_into(a, v[k], tmp);
      if (precond)
        precond->apply(tmp, w);
      else
        w = tmp;
      for (int i = 0; i <= k; ++i) {
        h[i][k] = dot(w, v[i]);
        axpy(-h[i][k], v[i], w);
      }
      h[k + 1][k] = norm2(w);
      if (std::isnan(h[k + 1][k]))
        throw SolverFailure("gmres: NaN in Arnoldi step", std::move(res.x),
                            total_iters, std::numeric_limits<double>::quiet_NaN());
      const bool breakdown = h[k + 1][k] <= 1e-300;
      if (!breakdown)
        for (int i = 0; i < n; ++i) v[k + 1][i] = w[i] / h[k + 1][k];
      // apply stored Givens rotations, then form a new one
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
        h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
        h[i][k] = t;
      }
      const double denom = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = denom == 0.0 ? 1.0 : h[k][k] / denom;
      sn[k] = denom == 0.0 ? 0.0 : h[k + 1][k] / denom;
      h[k][k] = denom;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= tol * bnorm || breakdown) {
        ++k;
        ++total_iters;
        break;
      }
    }

    // solve the triangular system and update x
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
    }
    for (int i = 0; i < k; ++i) axpy(y[i], v[i], res.x);

    const double rel = true_rel_residual(res.x);
    res.iterations = total_iters;
    res.relative_residual = rel;
    if (rel <= tol) return res;
  }
  throw SolverFailure("gmres: no convergence within max iterations",
                      std::move(res.x), total_iters, res.relative_residual);
}

}  // namespace pdearena
