#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "crossdiff/errors.hpp"
#include "crossdiff/kernel.hpp"
#include "crossdiff/nnls.hpp"
#include "crossdiff/particles.hpp"

using namespace crossdiff;

namespace {

double residual_norm(const std::vector<double>& a, std::size_t m, std::size_t n,
                     const std::vector<double>& b, const std::vector<double>& x) {
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = -b[i];
    for (std::size_t j = 0; j < n; ++j) r += a[i * n + j] * x[j];
    rss += r * r;
  }
  return std::sqrt(rss);
}

// KKT conditions for min ||Ax-b|| s.t. x >= 0: x >= 0, gradient of the
// objective g = A^T(Ax-b) >= 0, and complementarity x.g = 0.
void check_kkt(const std::vector<double>& a, std::size_t m, std::size_t n,
               const std::vector<double>& b, const std::vector<double>& x,
               double tol) {
  std::vector<double> r(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    r[i] = -b[i];
    for (std::size_t j = 0; j < n; ++j) r[i] += a[i * n + j] * x[j];
  }
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < n; ++j) {
    double g = 0.0;
    for (std::size_t i = 0; i < m; ++i) g += a[i * n + j] * r[i];
    CHECK(x[j] >= 0.0);
    CHECK(g >= -tol * scale);                    // no descent direction left
    CHECK(std::abs(x[j] * g) <= tol * scale);    // complementarity
  }
}

}  // namespace

TEST_CASE("zero data gives zero weights and zero residual") {
  const std::size_t n = 8;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
  const std::vector<double> b(n, 0.0);
  const auto res = nnls::solve(a, n, n, b);
  for (double w : res.weights) CHECK(w == 0.0);
  CHECK(res.residual_norm == 0.0);
}

TEST_CASE("an exactly representable target is recovered") {
  const kernel::KernelConfig cfg(0.07, 1e-6);
  const auto grid = particles::init_positions_uniform(0.0, 1.0, 40);
  const std::size_t mid = 17;
  const auto u0 = [&](double x) { return kernel::mollifier(cfg, x - grid[mid]); };
  const auto w = particles::init_weights_nnls(cfg, grid, u0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    CHECK(w[j] == doctest::Approx(j == mid ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("random nonnegative targets satisfy the KKT conditions") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> udist(0.0, 1.0);
  const kernel::KernelConfig cfg(0.04, 1e-6);
  const auto grid = particles::init_positions_uniform(0.0, 1.0, 50);
  const std::size_t n = grid.size();
  std::vector<double> a(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      a[k * n + l] = kernel::mollifier(cfg, grid[k] - grid[l]);
    }
  }
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> b(n);
    for (auto& v : b) v = udist(rng);
    const auto res = nnls::solve(a, n, n, b);
    check_kkt(a, n, n, b, res.weights, 1e-8);
    CHECK(res.residual_norm ==
          doctest::Approx(residual_norm(a, n, n, b, res.weights)).epsilon(1e-10));
  }
}

TEST_CASE("nnls beats the simple weight rule on the kernel fit") {
  // strongly overlapping kernels, smooth bump target
  const kernel::KernelConfig cfg(0.08, 1e-6);
  const auto grid = particles::init_positions_uniform(0.0, 1.0, 60);
  const auto u0 = [](double x) {
    const double y = (x - 0.5) / 0.15;
    return std::exp(-y * y);
  };
  const std::size_t n = grid.size();
  std::vector<double> a(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      a[k * n + l] = kernel::mollifier(cfg, grid[k] - grid[l]);
    }
  }
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = u0(grid[k]);

  const auto w_nnls = particles::init_weights_nnls(cfg, grid, u0);
  const auto w_simple = particles::init_weights_simple(grid, u0);
  const double r_nnls = residual_norm(a, n, n, b, w_nnls);
  const double r_simple = residual_norm(a, n, n, b, w_simple);
  CHECK(r_nnls < r_simple);
  for (double w : w_nnls) CHECK(w >= 0.0);
}

TEST_CASE("ill-conditioned overlapping kernels still terminate cleanly") {
  // kernel width well above the grid spacing: the Gram matrix is nearly
  // singular, the regime that makes naive active-set iterations cycle
  const kernel::KernelConfig cfg(0.02, 1e-6);
  const auto grid = particles::init_positions_uniform(0.0, 1.0, 120);
  const auto u0 = [](double x) {
    const double y = (x - 0.4) / 0.05;
    return std::exp(-y * y);
  };
  const auto w = particles::init_weights_nnls(cfg, grid, u0);
  const std::size_t n = grid.size();
  std::vector<double> a(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      a[k * n + l] = kernel::mollifier(cfg, grid[k] - grid[l]);
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = u0(grid[k]);
  for (double v : w) CHECK(v >= 0.0);
  // the fit should reproduce the samples to well under a percent of the peak
  CHECK(residual_norm(a, n, n, b, w) < 1e-2);
}

TEST_CASE("iteration cap raises SolverFailureError") {
  const std::size_t n = 30;
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> udist(0.0, 1.0);
  std::vector<double> a(n * n);
  for (auto& v : a) v = udist(rng);
  std::vector<double> b(n);
  for (auto& v : b) v = udist(rng);
  nnls::NnlsOptions opts;
  opts.max_iters = 1;
  CHECK_THROWS_AS(nnls::solve(a, n, n, b, opts), SolverFailureError);
}
