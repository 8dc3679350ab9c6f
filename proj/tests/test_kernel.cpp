#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "crossdiff/kernel.hpp"

using namespace crossdiff;
using kernel::KernelConfig;

namespace {

// test-side adaptive Simpson quadrature, independent of the library
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth = 0) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

TEST_CASE("mollifier values and normalization") {
  const KernelConfig unit(1.0, 1e-6);
  CHECK(kernel::mollifier(unit, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  const KernelConfig half(0.5, 1e-6);
  CHECK(kernel::mollifier(half, 0.0) == doctest::Approx(0.7978845608028654).epsilon(1e-14));

  for (double eps : {0.03, 0.5, 1.0, 2.7}) {
    const KernelConfig cfg(eps, 1e-6);
    const double mass = adaptive_simpson(
        [&](double x) { return kernel::mollifier(cfg, x); }, -10 * eps, 10 * eps,
        1e-14);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mollifier is even, gradient is odd") {
  const KernelConfig cfg(0.7, 1e-6);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double x = xs(rng);
    CHECK(kernel::mollifier(cfg, x) == doctest::Approx(kernel::mollifier(cfg, -x)));
    CHECK(kernel::mollifier_grad(cfg, x) ==
          doctest::Approx(-kernel::mollifier_grad(cfg, -x)));
  }
  CHECK(kernel::mollifier_grad(cfg, 0.0) == 0.0);
}

TEST_CASE("mollifier gradient against the frozen value and finite differences") {
  const KernelConfig cfg(1.0, 1e-6);
  CHECK(kernel::mollifier_grad(cfg, 1.0) ==
        doctest::Approx(-0.24197072451914337).epsilon(1e-12));
  const double h = 1e-6;
  for (double x : {-1.3, -0.2, 0.4, 1.0, 2.2}) {
    const double fd =
        (kernel::mollifier(cfg, x + h) - kernel::mollifier(cfg, x - h)) / (2 * h);
    CHECK(kernel::mollifier_grad(cfg, x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("density basics") {
  const KernelConfig cfg(1.0, 1e-6);
  SUBCASE("single particle of weight two") {
    const std::vector<double> pos = {0.0}, w = {2.0};
    CHECK(kernel::density(cfg, pos, w, 0.0) ==
          doctest::Approx(0.7978845608028654).epsilon(1e-14));
  }
  SUBCASE("empty particle list") {
    CHECK(kernel::density(cfg, {}, {}, 0.3) == 0.0);
    CHECK(kernel::density_grad(cfg, {}, {}, 0.3) == 0.0);
  }
  SUBCASE("symmetric pair") {
    const double d = 0.8;
    const std::vector<double> pos = {-d, d}, w = {1.0, 1.0};
    CHECK(kernel::density(cfg, pos, w, 0.0) ==
          doctest::Approx(2.0 * kernel::mollifier(cfg, d)).epsilon(1e-14));
    CHECK(kernel::density_grad(cfg, pos, w, 0.0) == doctest::Approx(0.0));
  }
  SUBCASE("gradient vanishes at an isolated particle") {
    const std::vector<double> pos = {0.4}, w = {1.7};
    CHECK(kernel::density_grad(cfg, pos, w, 0.4) == 0.0);
  }
}

TEST_CASE("density is nonnegative and reproduces the total mass") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pdist(-1.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.05, 2.0);
  const double eps = 0.13;
  const KernelConfig cfg(eps, 1e-6);
  std::vector<double> pos(25), w(25);
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = pdist(rng);
    w[i] = wdist(rng);
    total += w[i];
  }
  std::uniform_real_distribution<double> xs(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(kernel::density(cfg, pos, w, xs(rng)) >= 0.0);
  }
  const double integral = adaptive_simpson(
      [&](double x) {
        return kernel::density(cfg, pos, w, x, kernel::Summation::Full);
      },
      -1.0 - 10 * eps, 1.0 + 10 * eps, 1e-13);
  CHECK(integral == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("density gradient matches central differences on a random cloud") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pdist(-1.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.1, 1.5);
  const KernelConfig cfg(0.2, 1e-6);
  std::vector<double> pos(10), w(10);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = pdist(rng);
    w[i] = wdist(rng);
  }
  const double h = 1e-6;
  std::uniform_real_distribution<double> xs(-1.3, 1.3);
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng);
    const double fd = (kernel::density(cfg, pos, w, x + h) -
                       kernel::density(cfg, pos, w, x - h)) /
                      (2 * h);
    const double g = kernel::density_grad(cfg, pos, w, x);
    const double scale = std::max(1.0, std::abs(fd));
    CHECK(std::abs(g - fd) / scale < 1e-5);
  }
}

TEST_CASE("translation equivariance") {
  const KernelConfig cfg(0.31, 1e-6);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> pdist(-1.0, 1.0);
  std::vector<double> pos(12), w(12, 0.4);
  for (auto& p : pos) p = pdist(rng);
  const double shift = 0.6875;  // exactly representable
  std::vector<double> shifted = pos;
  for (auto& p : shifted) p += shift;
  for (double x : {-0.8, -0.1, 0.0, 0.33, 1.0}) {
    CHECK(kernel::density(cfg, pos, w, x) ==
          doctest::Approx(kernel::density(cfg, shifted, w, x + shift))
              .epsilon(1e-13));
  }
}

TEST_CASE("sorted window evaluation agrees with the direct sum") {
  const KernelConfig cfg(0.05, 1e-6);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> pdist(-1.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.1, 1.0);
  std::vector<double> pos(300), w(300);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = pdist(rng);
    w[i] = wdist(rng);
  }
  const kernel::SortedField field(cfg, pos, w);
  std::uniform_real_distribution<double> xs(-1.2, 1.2);
  for (int i = 0; i < 200; ++i) {
    const double x = xs(rng);
    const double direct = kernel::density(cfg, pos, w, x);
    const double dgrad = kernel::density_grad(cfg, pos, w, x);
    CHECK(field.value(x) == doctest::Approx(direct).epsilon(1e-13));
    CHECK(field.grad(x) == doctest::Approx(dgrad).epsilon(1e-13));
    double v, g;
    field.value_and_grad(x, v, g);
    CHECK(v == doctest::Approx(direct).epsilon(1e-13));
    CHECK(g == doctest::Approx(dgrad).epsilon(1e-13));
  }
}
