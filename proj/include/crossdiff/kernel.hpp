#pragma once

#include <span>
#include <vector>

namespace crossdiff::kernel {

enum class Family { Gaussian };

/// Mollifier parameters. `epsilon` is the kernel width, `epsilon_tilde`
/// guards divisions by near-zero densities in the velocity field.
struct KernelConfig {
  double epsilon = 1.0;
  double epsilon_tilde = 1e-6;
  Family family = Family::Gaussian;

  KernelConfig() = default;
  KernelConfig(double eps, double eps_tilde, Family fam = Family::Gaussian);
};

/// Terms with |x - y_k| beyond this many widths are dropped; the Gaussian
/// there is below 1e-14 of its peak.
inline constexpr double kSupportWidths = 8.0;

enum class Summation { Truncated, Full };

/// Kernel value at offset x. Unit mass, even, peak 1/(eps*sqrt(2*pi)).
double mollifier(const KernelConfig& cfg, double x);

/// d/dx of the mollifier; odd, zero at the origin.
double mollifier_grad(const KernelConfig& cfg, double x);

/// Reconstructed density sum_k w_k * mollifier(x - y_k). Empty input gives 0.
double density(const KernelConfig& cfg, std::span<const double> positions,
               std::span<const double> weights, double x,
               Summation mode = Summation::Truncated);

/// Spatial derivative of `density` at x.
double density_grad(const KernelConfig& cfg, std::span<const double> positions,
                    std::span<const double> weights, double x,
                    Summation mode = Summation::Truncated);

/// Particle cloud pre-sorted by position so that window-limited sums cost
/// O(particles within 8*eps) per evaluation. Weights follow the sort order.
class SortedField {
public:
  SortedField() = default;
  SortedField(const KernelConfig& cfg, std::span<const double> positions,
              std::span<const double> weights);

  double value(double x) const;
  double grad(double x) const;
  /// Both at once; one window scan.
  void value_and_grad(double x, double& value, double& grad) const;

  bool empty() const { return positions_.empty(); }

private:
  KernelConfig cfg_;
  std::vector<double> positions_;
  std::vector<double> weights_;
};

}  // namespace crossdiff::kernel
