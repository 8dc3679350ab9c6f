#include "crossdiff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crossdiff/errors.hpp"

namespace crossdiff::kernel {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}

KernelConfig::KernelConfig(double eps, double eps_tilde, Family fam)
    : epsilon(eps), epsilon_tilde(eps_tilde), family(fam) {
  if (!(eps > 0.0) || !(eps_tilde > 0.0)) {
    throw InvalidArgumentError("kernel: epsilon and epsilon_tilde must be positive");
  }
}

double mollifier(const KernelConfig& cfg, double x) {
  const double y = x / cfg.epsilon;
  return kInvSqrt2Pi / cfg.epsilon * std::exp(-0.5 * y * y);
}

double mollifier_grad(const KernelConfig& cfg, double x) {
  return -x / (cfg.epsilon * cfg.epsilon) * mollifier(cfg, x);
}

double density(const KernelConfig& cfg, std::span<const double> positions,
               std::span<const double> weights, double x, Summation mode) {
  const double cut = kSupportWidths * cfg.epsilon;
  double sum = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double dx = x - positions[k];
    if (mode == Summation::Truncated && std::abs(dx) > cut) continue;
    sum += weights[k] * mollifier(cfg, dx);
  }
  return sum;
}

double density_grad(const KernelConfig& cfg, std::span<const double> positions,
                    std::span<const double> weights, double x, Summation mode) {
  const double cut = kSupportWidths * cfg.epsilon;
  double sum = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double dx = x - positions[k];
    if (mode == Summation::Truncated && std::abs(dx) > cut) continue;
    sum += weights[k] * mollifier_grad(cfg, dx);
  }
  return sum;
}

SortedField::SortedField(const KernelConfig& cfg, std::span<const double> positions,
                         std::span<const double> weights)
    : cfg_(cfg) {
  const std::size_t n = positions.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  positions_.resize(n);
  weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    positions_[i] = positions[order[i]];
    weights_[i] = weights[order[i]];
  }
}

double SortedField::value(double x) const {
  const double cut = kSupportWidths * cfg_.epsilon;
  auto lo = std::lower_bound(positions_.begin(), positions_.end(), x - cut);
  auto hi = std::upper_bound(lo, positions_.end(), x + cut);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    sum += weights_[static_cast<std::size_t>(it - positions_.begin())] *
           mollifier(cfg_, x - *it);
  }
  return sum;
}

double SortedField::grad(double x) const {
  const double cut = kSupportWidths * cfg_.epsilon;
  auto lo = std::lower_bound(positions_.begin(), positions_.end(), x - cut);
  auto hi = std::upper_bound(lo, positions_.end(), x + cut);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    sum += weights_[static_cast<std::size_t>(it - positions_.begin())] *
           mollifier_grad(cfg_, x - *it);
  }
  return sum;
}

void SortedField::value_and_grad(double x, double& value, double& grad) const {
  const double cut = kSupportWidths * cfg_.epsilon;
  const double inv_eps2 = 1.0 / (cfg_.epsilon * cfg_.epsilon);
  auto lo = std::lower_bound(positions_.begin(), positions_.end(), x - cut);
  auto hi = std::upper_bound(lo, positions_.end(), x + cut);
  value = 0.0;
  grad = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double dx = x - *it;
    const double v = weights_[static_cast<std::size_t>(it - positions_.begin())] *
                     mollifier(cfg_, dx);
    value += v;
    grad += -dx * inv_eps2 * v;
  }
}

}  // namespace crossdiff::kernel
