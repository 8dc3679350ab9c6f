#include "crossdiff/exact.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff::exact {

double barenblatt(double t_star, double x, double t) {
  const double tau = t + t_star;
  const double bracket = 1.0 - x * x * std::pow(tau, -2.0 / 3.0) / 12.0;
  if (bracket <= 0.0) return 0.0;
  return 2.0 * std::pow(tau, -1.0 / 3.0) * bracket;
}

double support_radius(double t_star, double t) {
  return std::sqrt(12.0) * std::cbrt(t + t_star);
}

double interface_position(double t_star, double x0, double t) {
  return x0 * std::cbrt((t + t_star) / t_star);
}

ExactContactSolution::ExactContactSolution(double t_star_, double x0_,
                                           double half_width_)
    : t_star(t_star_), x0(x0_), half_width(half_width_) {
  if (!(t_star > 0.0)) {
    throw InvalidArgumentError("exact: t_star must be positive");
  }
  if (!(std::abs(x0) < support_radius(t_star, 0.0))) {
    throw InvalidArgumentError(
        "exact: x0 must lie inside the initial support");
  }
}

double ExactContactSolution::interface_at(double t) const {
  return interface_position(t_star, x0, t);
}

std::pair<double, double> ExactContactSolution::pair_at(double x, double t) const {
  const double eta = interface_at(t);
  const double total = barenblatt(t_star, x, t);
  if (x > eta) return {total, 0.0};
  if (x < eta) return {0.0, total};
  return {0.5 * total, 0.5 * total};
}

bool ExactContactSolution::support_contained(double t) const {
  return support_radius(t_star, t) < half_width;
}

std::pair<double, double> exact_pair(const ExactContactSolution& sol, double x,
                                     double t) {
  return sol.pair_at(x, t);
}

}  // namespace crossdiff::exact
