#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "crossdiff/kernel.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff::config {

enum class Method { Particle, Fem, Both };
enum class Preset { Exp1, Exp2A, Exp2B, Custom };
enum class WeightInit { Nnls, Simple };
enum class Redistribution { Off, Every, Gap };
enum class QKind { None, Constant, Linear };
enum class InitialKind { ExactPair, Gaussians };

/// A fully resolved run description: preset defaults with explicit
/// overrides already applied, derived quantities (kernel width, time steps)
/// filled in, and every value serializable back out as a manifest.
struct RunConfig {
  Method method = Method::Particle;
  Preset preset = Preset::Custom;
  int n = 1000;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  std::string output_dir = "out";
  long seed = 0;  // reserved; the pipelines are deterministic

  double xmin = 0.0, xmax = 0.0;

  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
  double c1 = 0, c2 = 0;
  double b1 = 0, b2 = 0;
  double alpha1 = 0, alpha2 = 0;
  double beta11 = 0, beta12 = 0, beta21 = 0, beta22 = 0;
  QKind q_kind = QKind::None;
  double q_value = 0.0;
  double q_scale = 0.0;
  double q_center = 0.0;

  double epsilon = 0.0;
  double epsilon_tilde = 1e-6;

  double particle_dt = 0.0;
  double fixed_point_tol = 4e-6;
  int max_fixed_point_iters = 50;
  WeightInit weight_init = WeightInit::Nnls;
  Redistribution redistribution = Redistribution::Off;
  long redistribution_period = 100;
  double redistribution_gap = 3.0;  // in kernel widths

  double fem_dt = 0.0;
  double fem_delta = 0.0;
  double fem_cutoff_eps = 1e-6;
  double fem_fp_tol = 1e-8;
  int fem_max_fp_iters = 100;

  bool exact_enabled = false;
  double t_star = 0.0;
  double x0 = 0.0;

  InitialKind initial_kind = InitialKind::Gaussians;
  double sigma = 0.001;
  double x1 = 0.4;
  double x2 = 0.6;

  bool operator==(const RunConfig&) const = default;

  model::ModelCoefficients model_coefficients() const;
  kernel::KernelConfig kernel_config() const;
  std::function<double(double)> initial_u1() const;
  std::function<double(double)> initial_u2() const;
  long particle_steps() const;
  long fem_steps() const;
};

/// Resolved preset defaults for a given resolution, before file overrides.
RunConfig preset_defaults(Preset preset, int n);

/// Parse + resolve + validate configuration text. Throws ParseError with
/// line/column on malformed text and ValidationError listing every violated
/// field otherwise. `overrides` are (section.key, value) pairs that replace
/// file entries before resolution; the CLI routes its flags through them.
RunConfig load_config_text(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig load_config_file(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Serialize every resolved parameter in the config grammar; the output
/// parses back to an identical RunConfig.
std::string to_manifest(const RunConfig& cfg);

const char* to_string(Method m);
const char* to_string(Preset p);
const char* to_string(WeightInit w);
const char* to_string(Redistribution r);
const char* to_string(QKind q);
const char* to_string(InitialKind k);

}  // namespace crossdiff::config
