#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossdiff/config.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::string config_path;
  std::string method;
  std::string preset;
  int n = 0;
  std::string out_dir;

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> o;
    if (!method.empty()) o.emplace_back("run.method", method);
    if (!preset.empty()) o.emplace_back("run.preset", preset);
    if (n > 0) o.emplace_back("run.n", std::to_string(n));
    if (!out_dir.empty()) o.emplace_back("run.output_dir", out_dir);
    return o;
  }
};

int run_command(const CommonFlags& flags) {
  const auto cfg = crossdiff::config::load_config_file(flags.config_path,
                                                       flags.overrides());
  const auto out = crossdiff::run::execute(cfg);
  std::printf("run complete: %ld particle steps, %ld fem steps, %zu files in %s\n",
              out.particle ? out.particle->steps : 0L,
              out.fem ? out.fem->steps : 0L, out.files.size(),
              cfg.output_dir.c_str());
  return kExitOk;
}

int validate_command(const CommonFlags& flags) {
  const auto cfg = crossdiff::config::load_config_file(flags.config_path,
                                                       flags.overrides());
  std::printf("configuration valid: preset=%s method=%s n=%d\n",
              crossdiff::config::to_string(cfg.preset),
              crossdiff::config::to_string(cfg.method), cfg.n);
  return kExitOk;
}

int presets_command(int n) {
  using namespace crossdiff::config;
  for (Preset p : {Preset::Exp1, Preset::Exp2A, Preset::Exp2B}) {
    const RunConfig c = preset_defaults(p, n);
    std::printf("%s (n=%d):\n", to_string(p), n);
    std::printf("  domain = [%g, %g], t_final = %g\n", c.xmin, c.xmax, c.t_final);
    std::printf("  A = [[%g, %g], [%g, %g]], b = (%g, %g), q = %s", c.a11, c.a12,
                c.a21, c.a22, c.b1, c.b2, to_string(c.q_kind));
    if (c.q_kind == QKind::Linear) {
      std::printf(" (%g * (x - %g))", c.q_scale, c.q_center);
    }
    std::printf("\n  epsilon = %.6g, particle dt = %.6g, fem dt = %.6g, fem delta = %g\n",
                c.epsilon, c.particle_dt, c.fem_dt, c.fem_delta);
    if (c.exact_enabled) {
      std::printf("  exact benchmark: t_star = %g, x0 = %g\n", c.t_star, c.x0);
    } else {
      std::printf("  initial: gaussians sigma = %g at x1 = %g, x2 = %g\n", c.sigma,
                  c.x1, c.x2);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-population cross-diffusion simulator: deterministic particle "
               "method and P1 finite-element reference scheme"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "execute a configured simulation");
  run_cmd->add_option("--config", run_flags.config_path, "configuration file")
      ->required();
  run_cmd->add_option("--method", run_flags.method, "particle | fem | both");
  run_cmd->add_option("--preset", run_flags.preset, "exp1 | exp2a | exp2b | custom");
  run_cmd->add_option("--n", run_flags.n, "resolution (particles or nodes)");
  run_cmd->add_option("--out", run_flags.out_dir, "output directory");

  CommonFlags validate_flags;
  auto* validate_cmd =
      app.add_subcommand("validate", "parse and validate a configuration");
  validate_cmd->add_option("--config", validate_flags.config_path, "configuration file")
      ->required();
  validate_cmd->add_option("--method", validate_flags.method, "particle | fem | both");
  validate_cmd->add_option("--preset", validate_flags.preset,
                           "exp1 | exp2a | exp2b | custom");
  validate_cmd->add_option("--n", validate_flags.n, "resolution (particles or nodes)");

  int presets_n = 1000;
  auto* presets_cmd =
      app.add_subcommand("presets", "list resolved preset parameters");
  presets_cmd->add_option("--n", presets_n, "resolution to resolve the presets at");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(run_flags);
    if (validate_cmd->parsed()) return validate_command(validate_flags);
    if (presets_cmd->parsed()) return presets_command(presets_n);
  } catch (const crossdiff::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const crossdiff::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const crossdiff::InvalidArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const crossdiff::NonConvergenceError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const crossdiff::SolverFailureError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const crossdiff::SingularSystemError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const crossdiff::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
