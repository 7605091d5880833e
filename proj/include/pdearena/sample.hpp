#ifndef PDEARENA_SAMPLE_HPP
#define PDEARENA_SAMPLE_HPP

#include <array>
#include <vector>

#include "pdearena/rng.hpp"

namespace pdearena {

/// A sampled point; only the first (input-dimension) coordinates are used.
using Point = std::array<double, 4>;

/// Latin hypercube sample of n points in the box [lo, hi]^dim: along each
/// dimension exactly one point lands in each of the n equal-width strata,
/// uniformly placed within its stratum.
std::vector<Point> lhs_sample(int n, int dim, const double* lo,
                              const double* hi, CounterRng& rng);

}  // namespace pdearena

#endif
