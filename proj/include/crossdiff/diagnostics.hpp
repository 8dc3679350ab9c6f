#pragma once

#include <utility>
#include <vector>

namespace crossdiff::diagnostics {

/// Two sampled densities on a shared strictly increasing grid. The common
/// exchange format between the particle, finite-element and exact pipelines.
struct GridFunctionPair {
  std::vector<double> grid;
  std::vector<double> u1;
  std::vector<double> u2;

  /// Throws InvalidArgumentError on length mismatch or non-increasing grid.
  void validate() const;
};

/// F(s) = s*(ln s - 1) + 1, extended by F(0) = 1. Nonnegative, zero at s = 1.
double entropy_integrand(double s);

/// Trapezoidal integral of F(u1) + F(u2). Samples below -1e-12 raise
/// NegativeInputError; tiny negatives are clamped to zero.
double entropy(const GridFunctionPair& sample);

struct L2Error {
  double e1 = 0;
  double e2 = 0;
  /// Set when the reference norm vanished and the value is the absolute norm.
  bool absolute1 = false;
  bool absolute2 = false;
};

/// Per-population relative L2 errors on the shared grid.
L2Error l2_relative_error(const GridFunctionPair& approx,
                          const GridFunctionPair& reference);

/// Mean over the two populations of the squared relative L2 error.
double mean_relative_square_error(const GridFunctionPair& approx,
                                  const GridFunctionPair& reference);

/// Trapezoidal masses of the two sampled densities.
std::pair<double, double> mass(const GridFunctionPair& sample);

/// Restriction to the grid points where keep(x) is true.
template <typename Pred>
GridFunctionPair restrict_grid(const GridFunctionPair& in, Pred keep) {
  GridFunctionPair out;
  for (std::size_t i = 0; i < in.grid.size(); ++i) {
    if (!keep(in.grid[i])) continue;
    out.grid.push_back(in.grid[i]);
    out.u1.push_back(in.u1[i]);
    out.u2.push_back(in.u2[i]);
  }
  return out;
}

}  // namespace crossdiff::diagnostics
