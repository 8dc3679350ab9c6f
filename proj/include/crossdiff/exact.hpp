#pragma once

#include <utility>

namespace crossdiff::exact {

/// Compactly supported self-similar profile
///   B(x, t) = 2*(t + t_star)^(-1/3) * [1 - x^2*(t + t_star)^(-2/3)/12]_+,
/// the building block of the segregated benchmark solution.
double barenblatt(double t_star, double x, double t);

/// Half-width of the support, sqrt(12)*(t + t_star)^(1/3).
double support_radius(double t_star, double t);

/// Trajectory of the point separating the two populations,
///   eta(t) = x0*((t + t_star)/t_star)^(1/3),
/// which satisfies eta(0) = x0 and eta' = eta / (3*(t + t_star)).
double interface_position(double t_star, double x0, double t);

/// Segregated two-population benchmark on (-R, R): population 1 occupies
/// x > eta(t), population 2 the mirror side, and u1 + u2 equals the
/// Barenblatt profile pointwise (each side takes B/2 at x = eta exactly).
struct ExactContactSolution {
  double t_star;
  double x0;
  double half_width;  // domain is (-half_width, half_width)

  /// Validates t_star > 0 and |x0| < support_radius(t_star, 0).
  ExactContactSolution(double t_star, double x0, double half_width);

  double interface_at(double t) const;
  std::pair<double, double> pair_at(double x, double t) const;
  double total_at(double x, double t) const { return barenblatt(t_star, x, t); }

  /// True while the support stays inside the domain up to time t.
  bool support_contained(double t) const;
};

std::pair<double, double> exact_pair(const ExactContactSolution& sol, double x,
                                     double t);

}  // namespace crossdiff::exact
