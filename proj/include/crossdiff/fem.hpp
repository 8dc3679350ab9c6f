#pragma once

#include <span>
#include <vector>

#include "crossdiff/model.hpp"

namespace crossdiff::fem {

/// Controls for the mass-lumped P1 scheme: time step, artificial-flux
/// strength delta, clamp parameter for the frozen coefficients, and the
/// inner fixed-point stopping data.
struct FemConfig {
  double dt = 0.0;
  double delta = 0.0;
  double cutoff_eps = 1e-6;
  double fp_tol = 1e-8;
  int max_fp_iters = 100;

  void validate() const;
};

/// Nodal values of both populations on a uniform mesh.
struct FemState {
  std::vector<double> nodes;
  std::vector<double> u1;
  std::vector<double> u2;
  double time = 0.0;

  void validate() const;
  double spacing() const;
  /// Lumped (vertex-rule) mass of one population.
  double lumped_mass(int population) const;
};

/// Clamp to [0, 1/cutoff_eps]; realizes both frozen-coefficient
/// regularizations, converging to the identity as cutoff_eps -> 0.
double cutoff(double cutoff_eps, double s);

/// One semi-implicit step. Frozen coefficients come from the previous inner
/// iterate, own-population gradients are implicit, cross gradients lag one
/// inner iterate, so each pass costs two tridiagonal solves. The growth
/// term is implicit, competition uses clamped previous-step values.
/// Throws NonConvergenceError or SingularSystemError.
FemState fem_step(const model::ModelCoefficients& coeffs, const FemConfig& cfg,
                  const FemState& state, int* inner_iterations = nullptr);

struct FemRunResult {
  std::vector<FemState> snapshots;
  FemState final_state;
  int max_inner_iterations = 0;
  long steps = 0;
};

/// March fem_step until t_final (must be an integer number of steps),
/// collecting states the first time each snapshot time is reached.
FemRunResult fem_run(const model::ModelCoefficients& coeffs, const FemConfig& cfg,
                     FemState initial, double t_final,
                     std::span<const double> snapshot_times = {});

}  // namespace crossdiff::fem
