#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "crossdiff/kernel.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff::particles {

/// One population: particle positions and their fixed positive masses.
/// The arrays stay aligned; zero-weight particles are dropped at creation.
struct Population {
  std::vector<double> positions;
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  /// Index-ordered sum, so repeated calls are bitwise reproducible.
  double mass() const;
};

struct ParticleEnsemble {
  double domain_min = 0.0;
  double domain_max = 1.0;
  std::array<Population, 2> pops;
  double time = 0.0;

  void validate() const;
};

/// Time-stepping controls. `check_grid` is the finite point set on which the
/// inner fixed point measures density changes between iterates.
struct StepConfig {
  double dt = 0.0;
  double fixed_point_tol = 4e-6;
  int max_fixed_point_iters = 50;
  std::vector<double> check_grid;

  void validate() const;
};

/// Specular reflection into [a, b], repeated until the point lands inside.
double reflect(double a, double b, double x);

/// Uniform grid a + (k-1)*(b-a)/(n-1) for k = 1..n, endpoints included.
/// Throws InvalidArgumentError for n < 2.
std::vector<double> init_positions_uniform(double a, double b, int n);

/// w_k = dx * u0(x_k) clamped below at zero; dx is read off the uniform
/// spacing of `positions`.
std::vector<double> init_weights_simple(std::span<const double> positions,
                                        const std::function<double(double)>& u0);

/// Nonnegative least-squares fit of the sampled target by the kernel matrix
/// K_{k,l} = mollifier(x_k - x_l). More accurate than the simple rule and
/// still nonnegative; see nnls::solve for failure modes.
std::vector<double> init_weights_nnls(const kernel::KernelConfig& cfg,
                                      std::span<const double> positions,
                                      const std::function<double(double)>& u0);

/// Bundle positions/weights into a population, dropping w <= 0 entries.
Population make_population(std::span<const double> positions,
                           std::span<const double> weights);

/// Read-only view of the four state arrays entering the velocity field.
struct StateView {
  std::span<const double> y1, v1, y2, v2;
};

/// Regularized velocity of particle k in population i (1 or 2):
///   -( a_i1*grad u1 + a_i2*grad u2
///      + c_i * u_i*grad u_i / (u_i^2 + eps_tilde^2) + b_i*q(y, t) )
/// with all densities reconstructed from the state view.
double velocity(const model::ModelCoefficients& coeffs,
                const kernel::KernelConfig& cfg, const StateView& state,
                int population, std::size_t k, double t);

struct HalfStepResult {
  std::array<std::vector<double>, 2> midpoint_positions;
  int iterations = 0;
};

/// Solve the implicit relation x_mid = x_n + (dt/2)*velocity(x_mid) by fixed
/// point, stopping when density changes on the check grid drop below
/// tol * dt. Throws NonConvergenceError past the iteration cap, which
/// normally signals dt too large relative to the kernel width.
HalfStepResult half_step_fixed_point(const model::ModelCoefficients& coeffs,
                                     const kernel::KernelConfig& cfg,
                                     const StepConfig& step,
                                     const ParticleEnsemble& ensemble);

/// One implicit-midpoint step: advance to x_n + dt*velocity(midpoint state),
/// reflect into the domain, keep weights untouched, advance time.
ParticleEnsemble full_step(const model::ModelCoefficients& coeffs,
                           const kernel::KernelConfig& cfg,
                           const StepConfig& step,
                           const ParticleEnsemble& ensemble);

/// Re-seed every population on `seed_positions`, refit weights against the
/// currently reconstructed density, drop zero weights, and rescale so each
/// population's mass is exactly preserved.
ParticleEnsemble redistribute(const kernel::KernelConfig& cfg,
                              std::span<const double> seed_positions,
                              const ParticleEnsemble& ensemble);

}  // namespace crossdiff::particles
