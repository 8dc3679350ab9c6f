#include "crossdiff/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crossdiff/errors.hpp"
#include "crossdiff/nnls.hpp"

namespace crossdiff::particles {

double Population::mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void ParticleEnsemble::validate() const {
  if (!(domain_min < domain_max)) {
    throw InvalidArgumentError("ensemble: empty domain interval");
  }
  for (const auto& p : pops) {
    if (p.positions.size() != p.weights.size()) {
      throw InvalidArgumentError("ensemble: position/weight length mismatch");
    }
    for (double x : p.positions) {
      if (!(x >= domain_min && x <= domain_max)) {
        throw InvalidArgumentError("ensemble: particle outside the domain");
      }
    }
    for (double w : p.weights) {
      if (!(w > 0.0)) {
        throw InvalidArgumentError("ensemble: weights must be strictly positive");
      }
    }
  }
}

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgumentError("step: dt must be positive");
  if (!(fixed_point_tol > 0.0)) {
    throw InvalidArgumentError("step: fixed_point_tol must be positive");
  }
  if (max_fixed_point_iters < 1) {
    throw InvalidArgumentError("step: max_fixed_point_iters must be positive");
  }
  if (check_grid.empty()) {
    throw InvalidArgumentError("step: check_grid must be nonempty");
  }
}

double reflect(double a, double b, double x) {
  if (!std::isfinite(x)) {
    throw InvalidArgumentError("reflect: position is not finite");
  }
  while (x < a || x > b) {
    if (x > b) x = 2.0 * b - x;
    if (x < a) x = 2.0 * a - x;
  }
  return x;
}

std::vector<double> init_positions_uniform(double a, double b, int n) {
  if (n < 2) {
    throw InvalidArgumentError("init_positions_uniform: need at least 2 points");
  }
  const double dx = (b - a) / (n - 1);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + k * dx;
  out.back() = b;
  return out;
}

std::vector<double> init_weights_simple(std::span<const double> positions,
                                        const std::function<double(double)>& u0) {
  if (positions.size() < 2) {
    throw InvalidArgumentError("init_weights_simple: need a uniform grid");
  }
  const double dx =
      (positions.back() - positions.front()) / double(positions.size() - 1);
  std::vector<double> w(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    w[k] = std::max(0.0, dx * u0(positions[k]));
  }
  return w;
}

std::vector<double> init_weights_nnls(const kernel::KernelConfig& cfg,
                                      std::span<const double> positions,
                                      const std::function<double(double)>& u0) {
  const std::size_t n = positions.size();
  std::vector<double> mat(n * n, 0.0);
  const double cut = kernel::kSupportWidths * cfg.epsilon;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const double dx = positions[k] - positions[l];
      if (std::abs(dx) > cut) continue;
      mat[k * n + l] = kernel::mollifier(cfg, dx);
    }
  }
  std::vector<double> target(n);
  for (std::size_t k = 0; k < n; ++k) target[k] = u0(positions[k]);
  return nnls::solve(mat, n, n, target).weights;
}

Population make_population(std::span<const double> positions,
                           std::span<const double> weights) {
  if (positions.size() != weights.size()) {
    throw InvalidArgumentError("make_population: length mismatch");
  }
  Population p;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (weights[k] > 0.0) {
      p.positions.push_back(positions[k]);
      p.weights.push_back(weights[k]);
    }
  }
  return p;
}

namespace {

// Velocity of every particle given the four state arrays; fields are built
// once per sweep and shared across particles.
void velocity_sweep(const model::ModelCoefficients& m,
                    const kernel::KernelConfig& cfg,
                    const std::array<std::vector<double>, 2>& pos,
                    const std::array<std::vector<double>, 2>& wts, double t,
                    std::array<std::vector<double>, 2>& vel) {
  const kernel::SortedField field1(cfg, pos[0], wts[0]);
  const kernel::SortedField field2(cfg, pos[1], wts[1]);
  const double guard2 = cfg.epsilon_tilde * cfg.epsilon_tilde;
  for (int i = 0; i < 2; ++i) {
    const double ai1 = m.a(i + 1, 1);
    const double ai2 = m.a(i + 1, 2);
    const double ci = m.c(i + 1);
    const double bi = m.b(i + 1);
    const auto& own = i == 0 ? field1 : field2;
    vel[i].resize(pos[i].size());
    for (std::size_t k = 0; k < pos[i].size(); ++k) {
      const double y = pos[i][k];
      double u_own, g_own;
      own.value_and_grad(y, u_own, g_own);
      const double g1 = i == 0 ? g_own : field1.grad(y);
      const double g2 = i == 1 ? g_own : field2.grad(y);
      double v = ai1 * g1 + ai2 * g2 + bi * m.q(y, t);
      if (ci != 0.0) v += ci * u_own * g_own / (u_own * u_own + guard2);
      vel[i][k] = -v;
    }
  }
}

void densities_on_grid(const kernel::KernelConfig& cfg,
                       const std::array<std::vector<double>, 2>& pos,
                       const std::array<std::vector<double>, 2>& wts,
                       std::span<const double> grid,
                       std::array<std::vector<double>, 2>& out) {
  for (int i = 0; i < 2; ++i) {
    const kernel::SortedField field(cfg, pos[i], wts[i]);
    out[i].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out[i][j] = field.value(grid[j]);
  }
}

}  // namespace

double velocity(const model::ModelCoefficients& m, const kernel::KernelConfig& cfg,
                const StateView& state, int population, std::size_t k, double t) {
  if (population != 1 && population != 2) {
    throw InvalidArgumentError("velocity: population must be 1 or 2");
  }
  const kernel::SortedField field1(cfg, state.y1, state.v1);
  const kernel::SortedField field2(cfg, state.y2, state.v2);
  const double y = population == 1 ? state.y1[k] : state.y2[k];
  const auto& own = population == 1 ? field1 : field2;
  double u_own, g_own;
  own.value_and_grad(y, u_own, g_own);
  const double g1 = population == 1 ? g_own : field1.grad(y);
  const double g2 = population == 2 ? g_own : field2.grad(y);
  const double guard2 = cfg.epsilon_tilde * cfg.epsilon_tilde;
  double v = m.a(population, 1) * g1 + m.a(population, 2) * g2 +
             m.b(population) * m.q(y, t);
  if (m.c(population) != 0.0) {
    v += m.c(population) * u_own * g_own / (u_own * u_own + guard2);
  }
  return -v;
}

HalfStepResult half_step_fixed_point(const model::ModelCoefficients& m,
                                     const kernel::KernelConfig& cfg,
                                     const StepConfig& step,
                                     const ParticleEnsemble& ensemble) {
  ensemble.validate();
  step.validate();
  const double t_half = ensemble.time + 0.5 * step.dt;
  const std::array<std::vector<double>, 2> base = {ensemble.pops[0].positions,
                                                   ensemble.pops[1].positions};
  const std::array<std::vector<double>, 2> wts = {ensemble.pops[0].weights,
                                                  ensemble.pops[1].weights};
  std::array<std::vector<double>, 2> iter = base;
  std::array<std::vector<double>, 2> prev_density;
  std::array<std::vector<double>, 2> density;
  std::array<std::vector<double>, 2> vel;
  densities_on_grid(cfg, iter, wts, step.check_grid, prev_density);

  for (int j = 1; j <= step.max_fixed_point_iters; ++j) {
    velocity_sweep(m, cfg, iter, wts, t_half, vel);
    for (int i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < base[i].size(); ++k) {
        iter[i][k] = base[i][k] + 0.5 * step.dt * vel[i][k];
      }
    }
    densities_on_grid(cfg, iter, wts, step.check_grid, density);
    double delta = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (std::size_t g = 0; g < density[i].size(); ++g) {
        delta = std::max(delta, std::abs(density[i][g] - prev_density[i][g]));
      }
    }
    if (delta <= step.fixed_point_tol * step.dt) {
      return {std::move(iter), j};
    }
    prev_density = density;
  }
  throw NonConvergenceError("particle half step", -1, step.max_fixed_point_iters);
}

ParticleEnsemble full_step(const model::ModelCoefficients& m,
                           const kernel::KernelConfig& cfg, const StepConfig& step,
                           const ParticleEnsemble& ensemble) {
  HalfStepResult half = half_step_fixed_point(m, cfg, step, ensemble);
  const std::array<std::vector<double>, 2> wts = {ensemble.pops[0].weights,
                                                  ensemble.pops[1].weights};
  std::array<std::vector<double>, 2> vel;
  velocity_sweep(m, cfg, half.midpoint_positions, wts,
                 ensemble.time + 0.5 * step.dt, vel);
  ParticleEnsemble out = ensemble;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < out.pops[i].positions.size(); ++k) {
      const double x = half.midpoint_positions[i][k] + 0.5 * step.dt * vel[i][k];
      out.pops[i].positions[k] = reflect(out.domain_min, out.domain_max, x);
    }
  }
  out.time = ensemble.time + step.dt;
  return out;
}

ParticleEnsemble redistribute(const kernel::KernelConfig& cfg,
                              std::span<const double> seed_positions,
                              const ParticleEnsemble& ensemble) {
  ParticleEnsemble out = ensemble;
  for (int i = 0; i < 2; ++i) {
    const Population& p = ensemble.pops[i];
    if (p.empty()) continue;
    const kernel::SortedField field(cfg, p.positions, p.weights);
    auto sampled = [&field](double x) { return field.value(x); };
    std::vector<double> w = init_weights_nnls(cfg, seed_positions, sampled);
    Population fresh = make_population(seed_positions, w);
    const double old_mass = p.mass();
    const double new_mass = fresh.mass();
    if (new_mass > 0.0) {
      const double scale = old_mass / new_mass;
      for (double& wk : fresh.weights) wk *= scale;
    }
    out.pops[i] = std::move(fresh);
  }
  return out;
}

}  // namespace crossdiff::particles
