#include "crossdiff/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff::fem {

void FemConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgumentError("fem: dt must be positive");
  if (!(delta >= 0.0)) throw InvalidArgumentError("fem: delta must be nonnegative");
  if (!(cutoff_eps > 0.0)) {
    throw InvalidArgumentError("fem: cutoff_eps must be positive");
  }
  if (!(fp_tol > 0.0)) throw InvalidArgumentError("fem: fp_tol must be positive");
  if (max_fp_iters < 1) {
    throw InvalidArgumentError("fem: max_fp_iters must be positive");
  }
}

void FemState::validate() const {
  if (nodes.size() < 2) throw InvalidArgumentError("fem: need at least 2 nodes");
  if (u1.size() != nodes.size() || u2.size() != nodes.size()) {
    throw InvalidArgumentError("fem: nodal vector length mismatch");
  }
  const double h = spacing();
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    if (std::abs(nodes[j + 1] - nodes[j] - h) > 1e-9 * std::abs(h)) {
      throw InvalidArgumentError("fem: mesh must be uniform");
    }
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!std::isfinite(u1[j]) || !std::isfinite(u2[j])) {
      throw InvalidArgumentError("fem: nodal values must be finite");
    }
  }
}

double FemState::spacing() const {
  return (nodes.back() - nodes.front()) / double(nodes.size() - 1);
}

double FemState::lumped_mass(int population) const {
  const auto& u = population == 1 ? u1 : u2;
  const double h = spacing();
  double sum = 0.5 * h * (u.front() + u.back());
  for (std::size_t j = 1; j + 1 < u.size(); ++j) sum += h * u[j];
  return sum;
}

double cutoff(double cutoff_eps, double s) {
  return std::clamp(s, 0.0, 1.0 / cutoff_eps);
}

namespace {

// Thomas elimination; lo/di/up are the three diagonals, rhs is overwritten
// with the solution.
void solve_tridiagonal(std::vector<double>& lo, std::vector<double>& di,
                       std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t j = 1; j < n; ++j) {
    if (di[j - 1] == 0.0 || !std::isfinite(di[j - 1])) {
      throw SingularSystemError("fem: vanishing pivot in tridiagonal solve");
    }
    const double w = lo[j] / di[j - 1];
    di[j] -= w * up[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  if (di[n - 1] == 0.0 || !std::isfinite(di[n - 1])) {
    throw SingularSystemError("fem: vanishing pivot in tridiagonal solve");
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) {
    rhs[j] = (rhs[j] - up[j] * rhs[j + 1]) / di[j];
  }
}

}  // namespace

FemState fem_step(const model::ModelCoefficients& m, const FemConfig& cfg,
                  const FemState& state, int* inner_iterations) {
  cfg.validate();
  state.validate();
  const std::size_t n = state.nodes.size();
  const double h = state.spacing();
  const double dt = cfg.dt;
  const double t_new = state.time + dt;

  std::vector<double> lumped(n, h);
  lumped.front() = lumped.back() = 0.5 * h;
  std::vector<double> q_mid(n - 1);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    q_mid[e] = m.q(0.5 * (state.nodes[e] + state.nodes[e + 1]), t_new);
  }

  const std::array<const std::vector<double>*, 2> prev = {&state.u1, &state.u2};
  std::array<std::vector<double>, 2> iter = {state.u1, state.u2};
  std::array<std::vector<double>, 2> next;

  std::vector<double> lo(n), di(n), up(n), rhs(n);
  std::vector<double> lam_prev_combo(n);

  for (int pass = 1;; ++pass) {
    if (pass > cfg.max_fp_iters) {
      throw NonConvergenceError("fem inner fixed point", -1, cfg.max_fp_iters);
    }
    std::array<std::vector<double>, 2> lam;
    for (int i = 0; i < 2; ++i) {
      lam[i].resize(n);
      for (std::size_t j = 0; j < n; ++j) lam[i][j] = cutoff(cfg.cutoff_eps, iter[i][j]);
    }
    for (int i = 0; i < 2; ++i) {
      const int o = 1 - i;
      const double aii = m.a(i + 1, i + 1);
      const double aio = m.a(i + 1, o + 1);
      const double ci = m.c(i + 1);
      const double bi = m.b(i + 1);
      const double alpha_i = m.alpha(i + 1);
      const double bi1 = m.beta(i + 1, 1);
      const double bi2 = m.beta(i + 1, 2);
      const double ds = 0.5 * cfg.delta;

      // competition term frozen at previous step / previous iterate
      for (std::size_t j = 0; j < n; ++j) {
        const double l1 = cutoff(cfg.cutoff_eps, (*prev[0])[j]);
        const double l2 = cutoff(cfg.cutoff_eps, (*prev[1])[j]);
        lam_prev_combo[j] = lam[i][j] * (bi1 * l1 + bi2 * l2);
      }

      std::fill(lo.begin(), lo.end(), 0.0);
      std::fill(up.begin(), up.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        di[j] = lumped[j] / dt - lumped[j] * alpha_i;
        rhs[j] = lumped[j] / dt * (*prev[i])[j] - lumped[j] * lam_prev_combo[j];
      }
      for (std::size_t e = 0; e + 1 < n; ++e) {
        const double lmid = 0.5 * (lam[i][e] + lam[i][e + 1]);
        const double grad_other = (iter[o][e + 1] - iter[o][e]) / h;
        const double ae = (lmid * aii + ci) / h;
        const double be = lmid * (aio * grad_other + bi * q_mid[e]);
        const double s_lo = ds * (lam[0][e] + lam[1][e]) / h;
        const double s_up = ds * (lam[0][e + 1] + lam[1][e + 1]) / h;
        di[e] += ae + s_lo;
        up[e] -= ae + s_up;
        rhs[e] += be;
        di[e + 1] += ae + s_up;
        lo[e + 1] -= ae + s_lo;
        rhs[e + 1] -= be;
      }
      next[i] = rhs;
      std::vector<double> lo2 = lo, di2 = di, up2 = up;
      solve_tridiagonal(lo2, di2, up2, next[i]);
    }
    double change = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        change = std::max(change, std::abs(next[i][j] - iter[i][j]));
      }
    }
    iter = next;
    if (change < cfg.fp_tol) {
      if (inner_iterations) *inner_iterations = pass;
      break;
    }
  }

  FemState out;
  out.nodes = state.nodes;
  out.u1 = std::move(iter[0]);
  out.u2 = std::move(iter[1]);
  out.time = t_new;
  return out;
}

FemRunResult fem_run(const model::ModelCoefficients& m, const FemConfig& cfg,
                     FemState initial, double t_final,
                     std::span<const double> snapshot_times) {
  cfg.validate();
  initial.validate();
  const double span = t_final - initial.time;
  if (span < 0.0) throw InvalidArgumentError("fem_run: t_final before state time");
  const long steps = std::lround(span / cfg.dt);
  if (std::abs(steps * cfg.dt - span) > 1e-9 * std::max(1.0, std::abs(span))) {
    throw InvalidArgumentError("fem_run: t_final must be a whole number of steps");
  }

  FemRunResult out;
  out.steps = steps;
  std::vector<bool> taken(snapshot_times.size(), false);
  auto collect = [&](const FemState& s) {
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
      if (!taken[i] && s.time >= snapshot_times[i] - 1e-12) {
        out.snapshots.push_back(s);
        taken[i] = true;
      }
    }
  };
  collect(initial);
  FemState current = std::move(initial);
  for (long step = 0; step < steps; ++step) {
    int inner = 0;
    try {
      current = fem_step(m, cfg, current, &inner);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("fem inner fixed point", step, e.iterations_used);
    }
    out.max_inner_iterations = std::max(out.max_inner_iterations, inner);
    collect(current);
  }
  out.final_state = std::move(current);
  return out;
}

}  // namespace crossdiff::fem
