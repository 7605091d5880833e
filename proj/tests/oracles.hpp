// Test-only reference implementations, kept independent of the library's
// solver paths: a tridiagonal direct solve, dense LU with partial pivoting,
// and central finite differences for gradients and second derivatives.
#ifndef PDEARENA_TESTS_ORACLES_HPP
#define PDEARENA_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Thomas algorithm; diagonals (lower a, main b, upper c), a[0] and
// c[n-1] unused.
inline std::vector<double> thomas_solve(std::vector<double> a,
                                        std::vector<double> b,
                                        std::vector<double> c,
                                        std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Dense LU with partial pivoting, row-major a (n x n).
inline std::vector<double> dense_lu_solve(std::vector<double> a,
                                          std::vector<double> b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (a[p * n + k] == 0.0) throw std::runtime_error("singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] / a[k * n + k];
      a[i * n + k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

// Central-difference gradient of a scalar function of a vector.
inline std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Second derivative along coordinate i by nested central differences.
inline double fd_second(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> x, std::size_t i, double h = 1e-4) {
  const double xi = x[i];
  x[i] = xi + h;
  const double fp = f(x);
  x[i] = xi - h;
  const double fm = f(x);
  x[i] = xi;
  const double f0 = f(x);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double max_rel_err(const std::vector<double>& got,
                          const std::vector<double>& want, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double denom = std::max(floor, std::abs(want[i]));
    worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
  }
  return worst;
}

}  // namespace oracles

#endif
