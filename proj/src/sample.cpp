#include "pdearena/sample.hpp"

#include <numeric>

#include "pdearena/errors.hpp"

namespace pdearena {

std::vector<Point> lhs_sample(int n, int dim, const double* lo,
                              const double* hi, CounterRng& rng) {
  if (n < 1) throw InvalidArgument("lhs_sample: need n >= 1");
  if (dim < 1 || dim > 4) throw InvalidArgument("lhs_sample: dim in [1,4]");
  std::vector<Point> pts(n);
  std::vector<int> strata(n);
  for (int d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with the shared stream keeps draws reproducible.
    for (int i = n - 1; i > 0; --i)
      std::swap(strata[i], strata[rng.next_below(i + 1)]);
    const double width = (hi[d] - lo[d]) / n;
    for (int i = 0; i < n; ++i)
      pts[i][d] = lo[d] + (strata[i] + rng.next_double()) * width;
  }
  return pts;
}

}  // namespace pdearena
