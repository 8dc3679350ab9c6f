#include "crossdiff/diagnostics.hpp"

#include <cmath>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff::diagnostics {

namespace {

constexpr double kNegativeBand = 1e-12;

double trapezoid(const std::vector<double>& grid, const std::vector<double>& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    sum += 0.5 * (grid[i + 1] - grid[i]) * (f[i] + f[i + 1]);
  }
  return sum;
}

void require_shared_grid(const GridFunctionPair& a, const GridFunctionPair& b) {
  if (a.grid.size() != b.grid.size()) {
    throw GridMismatchError("diagnostics: grids differ in size");
  }
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (a.grid[i] != b.grid[i]) {
      throw GridMismatchError("diagnostics: grids differ at index " +
                              std::to_string(i));
    }
  }
}

}  // namespace

void GridFunctionPair::validate() const {
  if (u1.size() != grid.size() || u2.size() != grid.size()) {
    throw InvalidArgumentError("diagnostics: sample length mismatch");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw InvalidArgumentError("diagnostics: grid must be strictly increasing");
    }
  }
}

double entropy_integrand(double s) {
  if (s <= 0.0) return 1.0;
  return s * (std::log(s) - 1.0) + 1.0;
}

double entropy(const GridFunctionPair& sample) {
  sample.validate();
  std::vector<double> f(sample.grid.size());
  for (std::size_t i = 0; i < sample.grid.size(); ++i) {
    for (double v : {sample.u1[i], sample.u2[i]}) {
      if (v < -kNegativeBand) {
        throw NegativeInputError("entropy: sample value " + std::to_string(v) +
                                 " below the clamping band");
      }
    }
    f[i] = entropy_integrand(std::max(0.0, sample.u1[i])) +
           entropy_integrand(std::max(0.0, sample.u2[i]));
  }
  return trapezoid(sample.grid, f);
}

L2Error l2_relative_error(const GridFunctionPair& approx,
                          const GridFunctionPair& reference) {
  approx.validate();
  reference.validate();
  require_shared_grid(approx, reference);
  const std::size_t n = approx.grid.size();
  L2Error out;
  for (int pop = 0; pop < 2; ++pop) {
    const auto& ua = pop == 0 ? approx.u1 : approx.u2;
    const auto& ur = pop == 0 ? reference.u1 : reference.u2;
    std::vector<double> diff2(n), ref2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ua[i] - ur[i];
      diff2[i] = d * d;
      ref2[i] = ur[i] * ur[i];
    }
    const double num = std::sqrt(trapezoid(approx.grid, diff2));
    const double den = std::sqrt(trapezoid(approx.grid, ref2));
    const bool absolute = den == 0.0;
    const double e = absolute ? num : num / den;
    if (pop == 0) {
      out.e1 = e;
      out.absolute1 = absolute;
    } else {
      out.e2 = e;
      out.absolute2 = absolute;
    }
  }
  return out;
}

double mean_relative_square_error(const GridFunctionPair& approx,
                                  const GridFunctionPair& reference) {
  const L2Error e = l2_relative_error(approx, reference);
  return 0.5 * (e.e1 * e.e1 + e.e2 * e.e2);
}

std::pair<double, double> mass(const GridFunctionPair& sample) {
  sample.validate();
  return {trapezoid(sample.grid, sample.u1), trapezoid(sample.grid, sample.u2)};
}

}  // namespace crossdiff::diagnostics
