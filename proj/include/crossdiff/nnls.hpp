#pragma once

#include <cstddef>
#include <vector>

namespace crossdiff::nnls {

struct NnlsOptions {
  /// Dual-variable tolerance relative to max|A^T b|.
  double kkt_tol = 1e-12;
  /// Major-iteration cap; 0 means 10*n with a floor of 100.
  int max_iters = 0;
};

struct NnlsResult {
  std::vector<double> weights;   // length n, all entries >= 0
  double residual_norm = 0.0;    // ||A w - b||_2
  int iterations = 0;
};

/// Minimize ||A w - b||_2 subject to w >= 0 for a dense row-major m-by-n
/// matrix. Active-set method working on the cached Gram matrix A^T A with
/// an incrementally grown Cholesky factor; near-dependent columns are
/// rejected the way Lawson-Hanson rejects them, which keeps the iteration
/// from cycling on strongly overlapping kernel columns.
///
/// Throws SolverFailureError when the iteration cap is exceeded.
NnlsResult solve(const std::vector<double>& a, std::size_t m, std::size_t n,
                 const std::vector<double>& b, const NnlsOptions& opts = {});

}  // namespace crossdiff::nnls
