#include "crossdiff/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "crossdiff/errors.hpp"
#include "crossdiff/exact.hpp"
#include "crossdiff/fem.hpp"
#include "crossdiff/kernel.hpp"

namespace crossdiff::run {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path) {
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot open for writing: " + path.string());
    out_ << header << "\n";
  }
  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, put(fields)), ...);
    out_ << "\n";
  }
  void close() {
    out_.close();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

private:
  void put(double v) { out_ << fmt(v); }
  void put(int v) { out_ << v; }
  void put(long v) { out_ << v; }
  void put(std::size_t v) { out_ << v; }
  void put(const std::string& v) { out_ << v; }
  fs::path path_;
  std::ofstream out_;
};

void write_particle_snapshot(const fs::path& path,
                             const particles::ParticleEnsemble& e) {
  CsvWriter csv(path, "population,k,x,value");
  for (int i = 0; i < 2; ++i) {
    const auto& p = e.pops[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      csv.row(i + 1, k, p.positions[k], p.weights[k]);
    }
  }
  csv.close();
}

void write_fem_snapshot(const fs::path& path, const fem::FemState& s) {
  CsvWriter csv(path, "population,k,x,value");
  for (int i = 0; i < 2; ++i) {
    const auto& u = i == 0 ? s.u1 : s.u2;
    for (std::size_t j = 0; j < s.nodes.size(); ++j) {
      csv.row(i + 1, j, s.nodes[j], u[j]);
    }
  }
  csv.close();
}

double entropy_of_positive_part(const diagnostics::GridFunctionPair& s) {
  diagnostics::GridFunctionPair clamped = s;
  for (double& v : clamped.u1) v = std::max(0.0, v);
  for (double& v : clamped.u2) v = std::max(0.0, v);
  return diagnostics::entropy(clamped);
}

ReportRow make_row(double time, const diagnostics::GridFunctionPair& approx,
                   const diagnostics::GridFunctionPair* reference) {
  ReportRow row;
  row.time = time;
  if (reference) {
    const auto err = diagnostics::l2_relative_error(approx, *reference);
    row.e1 = err.e1;
    row.e2 = err.e2;
    row.mrse = diagnostics::mean_relative_square_error(approx, *reference);
  } else {
    row.e1 = row.e2 = row.mrse = std::numeric_limits<double>::quiet_NaN();
  }
  const auto [m1, m2] = diagnostics::mass(approx);
  row.m1 = m1;
  row.m2 = m2;
  row.entropy = entropy_of_positive_part(approx);
  return row;
}

void write_report(const fs::path& path, const std::vector<ReportRow>& rows) {
  CsvWriter csv(path, "time,e1,e2,mrse,m1,m2,entropy");
  for (const auto& r : rows) {
    csv.row(r.time, r.e1, r.e2, r.mrse, r.m1, r.m2, r.entropy);
  }
  csv.close();
}

diagnostics::GridFunctionPair sample_ensemble(const kernel::KernelConfig& kcfg,
                                              const particles::ParticleEnsemble& e,
                                              const std::vector<double>& grid) {
  diagnostics::GridFunctionPair out;
  out.grid = grid;
  const kernel::SortedField f1(kcfg, e.pops[0].positions, e.pops[0].weights);
  const kernel::SortedField f2(kcfg, e.pops[1].positions, e.pops[1].weights);
  out.u1.resize(grid.size());
  out.u2.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.u1[j] = f1.value(grid[j]);
    out.u2[j] = f2.value(grid[j]);
  }
  return out;
}

diagnostics::GridFunctionPair sample_fem(const fem::FemState& s) {
  return diagnostics::GridFunctionPair{s.nodes, s.u1, s.u2};
}

diagnostics::GridFunctionPair sample_exact(const config::RunConfig& cfg,
                                           const std::vector<double>& grid,
                                           double t) {
  const exact::ExactContactSolution sol(cfg.t_star, cfg.x0,
                                        0.5 * (cfg.xmax - cfg.xmin));
  diagnostics::GridFunctionPair out;
  out.grid = grid;
  out.u1.resize(grid.size());
  out.u2.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto [u1, u2] = sol.pair_at(grid[j], t);
    out.u1[j] = u1;
    out.u2[j] = u2;
  }
  return out;
}

bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

double max_adjacent_gap(const std::vector<double>& positions) {
  if (positions.size() < 2) return 0.0;
  std::vector<double> sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  double gap = 0.0;
  for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
    gap = std::max(gap, sorted[k + 1] - sorted[k]);
  }
  return gap;
}

particles::ParticleEnsemble initial_ensemble(const config::RunConfig& cfg,
                                             const std::vector<double>& grid) {
  const kernel::KernelConfig kcfg = cfg.kernel_config();
  const auto u10 = cfg.initial_u1();
  const auto u20 = cfg.initial_u2();
  particles::ParticleEnsemble e;
  e.domain_min = cfg.xmin;
  e.domain_max = cfg.xmax;
  e.time = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto& u0 = i == 0 ? u10 : u20;
    std::vector<double> w;
    if (cfg.weight_init == config::WeightInit::Nnls) {
      w = particles::init_weights_nnls(kcfg, grid, u0);
    } else {
      w = particles::init_weights_simple(grid, u0);
    }
    e.pops[i] = particles::make_population(grid, w);
  }
  return e;
}

}  // namespace

std::optional<double> estimate_interface(const diagnostics::GridFunctionPair& s) {
  std::optional<double> leftmost;
  for (std::size_t j = s.grid.size(); j-- > 0;) {
    if (s.u1[j] > s.u2[j]) {
      leftmost = s.grid[j];
    } else if (leftmost) {
      break;
    }
  }
  return leftmost;
}

RunOutput execute(const config::RunConfig& cfg) {
  RunOutput out;
  out.resolved = cfg;
  out.grid = particles::init_positions_uniform(cfg.xmin, cfg.xmax, cfg.n);

  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());

  const bool run_particles = cfg.method != config::Method::Fem;
  const bool run_fem = cfg.method != config::Method::Particle;
  const kernel::KernelConfig kcfg =
      run_particles ? cfg.kernel_config() : kernel::KernelConfig();

  // particle pipeline with snapshots at the requested times
  std::vector<std::pair<double, diagnostics::GridFunctionPair>> particle_samples;
  if (run_particles) {
    PipelineOutput stats;
    const auto t0 = std::chrono::steady_clock::now();
    const model::ModelCoefficients m = cfg.model_coefficients();
    particles::StepConfig step;
    step.dt = cfg.particle_dt;
    step.fixed_point_tol = cfg.fixed_point_tol;
    step.max_fixed_point_iters = cfg.max_fixed_point_iters;
    step.check_grid = out.grid;

    particles::ParticleEnsemble e = initial_ensemble(cfg, out.grid);
    stats.initial_mass[0] = e.pops[0].mass();
    stats.initial_mass[1] = e.pops[1].mass();
    double mass_ref[2] = {stats.initial_mass[0], stats.initial_mass[1]};

    std::vector<bool> taken(cfg.snapshot_times.size(), false);
    int snap_index = 0;
    auto maybe_snapshot = [&](const particles::ParticleEnsemble& ens) {
      for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
        if (!taken[i] && ens.time >= cfg.snapshot_times[i] - 1e-12) {
          taken[i] = true;
          const fs::path p =
              dir / ("particle_snapshot_" + std::to_string(snap_index++) + ".csv");
          write_particle_snapshot(p, ens);
          out.files.push_back(p);
          particle_samples.emplace_back(ens.time, sample_ensemble(kcfg, ens, out.grid));
        }
      }
    };
    maybe_snapshot(e);

    const long steps = cfg.particle_steps();
    for (long n = 0; n < steps; ++n) {
      try {
        const auto half = particles::half_step_fixed_point(m, kcfg, step, e);
        stats.max_fixed_point_iterations =
            std::max(stats.max_fixed_point_iterations, half.iterations);
        e = particles::full_step(m, kcfg, step, e);
      } catch (const NonConvergenceError& err) {
        throw NonConvergenceError("particle half step", n, err.iterations_used);
      }
      for (int i = 0; i < 2; ++i) {
        if (!bitwise_equal(e.pops[i].mass(), mass_ref[i])) {
          stats.mass_bit_identical = false;
        }
      }
      bool redistribute_now = false;
      if (cfg.redistribution == config::Redistribution::Every) {
        redistribute_now = (n + 1) % cfg.redistribution_period == 0;
      } else if (cfg.redistribution == config::Redistribution::Gap) {
        for (int i = 0; i < 2; ++i) {
          if (max_adjacent_gap(e.pops[i].positions) >
              cfg.redistribution_gap * kcfg.epsilon) {
            redistribute_now = true;
          }
        }
      }
      if (redistribute_now) {
        e = particles::redistribute(kcfg, out.grid, e);
        mass_ref[0] = e.pops[0].mass();
        mass_ref[1] = e.pops[1].mass();
        ++stats.redistributions;
      }
      maybe_snapshot(e);
    }
    stats.steps = steps;
    stats.final_mass[0] = e.pops[0].mass();
    stats.final_mass[1] = e.pops[1].mass();
    stats.final_sample = sample_ensemble(kcfg, e, out.grid);
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const fs::path p = dir / "particle_final.csv";
    write_particle_snapshot(p, e);
    out.files.push_back(p);
    out.particle = std::move(stats);
  }

  // finite-element pipeline
  std::vector<std::pair<double, diagnostics::GridFunctionPair>> fem_samples;
  if (run_fem) {
    PipelineOutput stats;
    const auto t0 = std::chrono::steady_clock::now();
    const model::ModelCoefficients m = cfg.model_coefficients();
    fem::FemConfig fcfg;
    fcfg.dt = cfg.fem_dt;
    fcfg.delta = cfg.fem_delta;
    fcfg.cutoff_eps = cfg.fem_cutoff_eps;
    fcfg.fp_tol = cfg.fem_fp_tol;
    fcfg.max_fp_iters = cfg.fem_max_fp_iters;

    fem::FemState init;
    init.nodes = out.grid;
    init.u1.resize(out.grid.size());
    init.u2.resize(out.grid.size());
    const auto u10 = cfg.initial_u1();
    const auto u20 = cfg.initial_u2();
    for (std::size_t j = 0; j < out.grid.size(); ++j) {
      init.u1[j] = u10(out.grid[j]);
      init.u2[j] = u20(out.grid[j]);
    }
    stats.initial_mass[0] = init.lumped_mass(1);
    stats.initial_mass[1] = init.lumped_mass(2);

    const auto result =
        fem::fem_run(m, fcfg, std::move(init), cfg.t_final, cfg.snapshot_times);
    int snap_index = 0;
    for (const auto& s : result.snapshots) {
      const fs::path p =
          dir / ("fem_snapshot_" + std::to_string(snap_index++) + ".csv");
      write_fem_snapshot(p, s);
      out.files.push_back(p);
      fem_samples.emplace_back(s.time, sample_fem(s));
    }
    stats.steps = result.steps;
    stats.max_fixed_point_iterations = result.max_inner_iterations;
    stats.final_mass[0] = result.final_state.lumped_mass(1);
    stats.final_mass[1] = result.final_state.lumped_mass(2);
    stats.final_sample = sample_fem(result.final_state);
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const fs::path p = dir / "fem_final.csv";
    write_fem_snapshot(p, result.final_state);
    out.files.push_back(p);
    out.fem = std::move(stats);
  }

  if (cfg.exact_enabled) {
    out.exact_sample = sample_exact(cfg, out.grid, cfg.t_final);
  }

  // error reports: against the exact solution when available, and across
  // methods when both ran
  auto emit_report = [&](const std::string& name,
                         const std::vector<std::pair<double,
                                                     diagnostics::GridFunctionPair>>&
                             samples,
                         const diagnostics::GridFunctionPair& final_sample,
                         auto reference_at) {
    std::vector<ReportRow> rows;
    for (const auto& [t, s] : samples) {
      const auto ref = reference_at(t);
      rows.push_back(make_row(t, s, ref ? &*ref : nullptr));
    }
    const auto ref = reference_at(cfg.t_final);
    rows.push_back(make_row(cfg.t_final, final_sample, ref ? &*ref : nullptr));
    const fs::path p = dir / ("report_" + name + ".csv");
    write_report(p, rows);
    out.files.push_back(p);
  };

  if (out.particle) {
    if (cfg.exact_enabled) {
      emit_report("particle_vs_exact", particle_samples, out.particle->final_sample,
                  [&](double t) {
                    return std::optional<diagnostics::GridFunctionPair>(
                        sample_exact(cfg, out.grid, t));
                  });
    } else {
      emit_report("particle", particle_samples, out.particle->final_sample,
                  [](double) { return std::optional<diagnostics::GridFunctionPair>(); });
    }
  }
  if (out.fem) {
    if (cfg.exact_enabled) {
      emit_report("fem_vs_exact", fem_samples, out.fem->final_sample, [&](double t) {
        return std::optional<diagnostics::GridFunctionPair>(
            sample_exact(cfg, out.grid, t));
      });
    } else {
      emit_report("fem", fem_samples, out.fem->final_sample,
                  [](double) { return std::optional<diagnostics::GridFunctionPair>(); });
    }
  }
  if (out.particle && out.fem) {
    emit_report("particle_vs_fem", particle_samples, out.particle->final_sample,
                [&](double t) -> std::optional<diagnostics::GridFunctionPair> {
                  if (std::abs(t - cfg.t_final) <= 1e-12) {
                    return out.fem->final_sample;
                  }
                  for (const auto& [tf, s] : fem_samples) {
                    if (std::abs(tf - t) <= std::max(cfg.particle_dt, cfg.fem_dt)) {
                      return s;
                    }
                  }
                  return std::nullopt;
                });
  }

  // manifest: every resolved parameter, then timing comments
  const fs::path mpath = dir / "manifest.ini";
  {
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf) throw IoError("cannot write manifest: " + mpath.string());
    mf << config::to_manifest(cfg);
    mf << "\n# timings (seconds, informational)\n";
    if (out.particle) {
      mf << "# particle_seconds = " << fmt(out.particle->seconds) << "\n";
      mf << "# particle_steps = " << out.particle->steps << "\n";
      mf << "# particle_max_fixed_point_iterations = "
         << out.particle->max_fixed_point_iterations << "\n";
      mf << "# particle_redistributions = " << out.particle->redistributions << "\n";
    }
    if (out.fem) {
      mf << "# fem_seconds = " << fmt(out.fem->seconds) << "\n";
      mf << "# fem_steps = " << out.fem->steps << "\n";
      mf << "# fem_max_inner_iterations = " << out.fem->max_fixed_point_iterations
         << "\n";
    }
    mf.close();
    if (!mf) throw IoError("write failed: " + mpath.string());
  }
  out.files.push_back(mpath);
  return out;
}

}  // namespace crossdiff::run
