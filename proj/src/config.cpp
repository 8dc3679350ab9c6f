#include "crossdiff/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "crossdiff/errors.hpp"
#include "crossdiff/exact.hpp"

namespace crossdiff::config {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  int column = 0;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Key/value sections with '#'/';' comments; see README for the grammar.
RawMap tokenize(const std::string& text) {
  RawMap out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    std::string body = comment == std::string::npos ? line : line.substr(0, comment);
    const std::string t = trim(body);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw ParseError("malformed section header", lineno,
                         int(body.find('[')) + 1);
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ParseError("empty section name", lineno, int(body.find('[')) + 1);
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", lineno,
                       int(body.find_first_not_of(" \t")) + 1);
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw ParseError("missing key before '='", lineno, 1);
    }
    if (section.empty()) {
      throw ParseError("key outside of any [section]", lineno, 1);
    }
    const std::string full = section + "." + key;
    if (out.count(full)) {
      throw ParseError("duplicate key '" + full + "'", lineno, 1);
    }
    out[full] = RawEntry{trim(body.substr(eq + 1)), lineno, int(eq) + 2};
  }
  return out;
}

double parse_double(const RawEntry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    throw ParseError("invalid number for '" + key + "': '" + e.value + "'",
                     e.line, e.column);
  }
  return v;
}

long parse_long(const RawEntry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0') {
    throw ParseError("invalid integer for '" + key + "': '" + e.value + "'",
                     e.line, e.column);
  }
  return v;
}

bool parse_bool(const RawEntry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ParseError("invalid boolean for '" + key + "': '" + e.value + "'",
                   e.line, e.column);
}

std::vector<double> parse_double_list(const RawEntry& e, const std::string& key) {
  std::vector<double> out;
  std::string buf = e.value;
  for (char& c : buf) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(buf);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
      throw ParseError("invalid number in list for '" + key + "': '" + tok + "'",
                       e.line, e.column);
    }
    out.push_back(v);
  }
  return out;
}

template <typename Enum>
Enum parse_enum(const RawEntry& e, const std::string& key,
                std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, value] : table) {
    if (e.value == name) return value;
  }
  throw ParseError("invalid value for '" + key + "': '" + e.value + "'", e.line,
                   e.column);
}

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_unset(double v) { return std::isnan(v); }

// Snap dt downward so that t_final is a whole number of steps; idempotent
// when dt already divides t_final.
double snap_dt(double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final > 0.0)) return dt;
  const double raw = t_final / dt;
  const double steps = std::ceil(raw - 1e-9);
  return t_final / steps;
}

}  // namespace

RunConfig preset_defaults(Preset preset, int n) {
  RunConfig cfg;
  cfg.preset = preset;
  cfg.n = n;
  cfg.method = Method::Both;
  const double dx = n > 0 ? 1.0 / n : kUnset;
  switch (preset) {
    case Preset::Exp1:
      cfg.t_final = 0.01;
      cfg.xmin = -1.0;
      cfg.xmax = 1.0;
      cfg.a11 = cfg.a12 = cfg.a21 = cfg.a22 = 1.0;
      cfg.q_kind = QKind::None;
      cfg.epsilon = 0.15 * std::pow(dx, 0.75);
      cfg.particle_dt = 0.1 * cfg.epsilon * cfg.epsilon;
      cfg.fem_dt = cfg.particle_dt;
      cfg.fem_delta = 0.0;
      cfg.exact_enabled = true;
      cfg.t_star = 0.01;
      cfg.x0 = 0.0;
      cfg.initial_kind = InitialKind::ExactPair;
      break;
    case Preset::Exp2A:
    case Preset::Exp2B:
      cfg.t_final = preset == Preset::Exp2A ? 0.01 : 0.02;
      cfg.xmin = 0.0;
      cfg.xmax = 1.0;
      if (preset == Preset::Exp2A) {
        cfg.a11 = 3.0; cfg.a12 = 3.0; cfg.a21 = 1.0; cfg.a22 = 1.0;
        cfg.b1 = 0.0; cfg.b2 = 0.0;
      } else {
        cfg.a11 = cfg.a12 = cfg.a21 = cfg.a22 = 1.0;
        cfg.b1 = 1.0; cfg.b2 = 10.0;
      }
      cfg.q_kind = QKind::Linear;
      cfg.q_scale = -3.0;
      cfg.q_center = 0.5;
      cfg.epsilon = 0.5 * std::pow(dx, 0.75);
      cfg.particle_dt = 0.5 * cfg.epsilon * cfg.epsilon;
      cfg.fem_dt = cfg.particle_dt;
      cfg.fem_delta = 1e-3;
      cfg.exact_enabled = false;
      cfg.initial_kind = InitialKind::Gaussians;
      cfg.sigma = 0.001;
      cfg.x1 = 0.4;
      cfg.x2 = 0.6;
      break;
    case Preset::Custom:
      cfg.t_final = kUnset;
      cfg.xmin = kUnset;
      cfg.xmax = kUnset;
      cfg.epsilon = kUnset;
      cfg.particle_dt = kUnset;
      cfg.fem_dt = kUnset;
      break;
  }
  return cfg;
}

namespace {

void apply_overrides(RunConfig& cfg, const RawMap& raw) {
  auto get = [&raw](const char* key) -> const RawEntry* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto set_d = [&](const char* key, double& field) {
    if (const RawEntry* e = get(key)) field = parse_double(*e, key);
  };
  auto set_i = [&](const char* key, int& field) {
    if (const RawEntry* e = get(key)) field = int(parse_long(*e, key));
  };
  auto set_l = [&](const char* key, long& field) {
    if (const RawEntry* e = get(key)) field = parse_long(*e, key);
  };

  if (const RawEntry* e = get("run.method")) {
    cfg.method = parse_enum<Method>(*e, "run.method",
                                    {{"particle", Method::Particle},
                                     {"fem", Method::Fem},
                                     {"both", Method::Both}});
  }
  set_d("run.t_final", cfg.t_final);
  if (const RawEntry* e = get("run.snapshot_times")) {
    cfg.snapshot_times = parse_double_list(*e, "run.snapshot_times");
  }
  if (const RawEntry* e = get("run.output_dir")) cfg.output_dir = e->value;
  set_l("run.seed", cfg.seed);

  set_d("domain.xmin", cfg.xmin);
  set_d("domain.xmax", cfg.xmax);

  set_d("model.a11", cfg.a11); set_d("model.a12", cfg.a12);
  set_d("model.a21", cfg.a21); set_d("model.a22", cfg.a22);
  set_d("model.c1", cfg.c1); set_d("model.c2", cfg.c2);
  set_d("model.b1", cfg.b1); set_d("model.b2", cfg.b2);
  set_d("model.alpha1", cfg.alpha1); set_d("model.alpha2", cfg.alpha2);
  set_d("model.beta11", cfg.beta11); set_d("model.beta12", cfg.beta12);
  set_d("model.beta21", cfg.beta21); set_d("model.beta22", cfg.beta22);
  if (const RawEntry* e = get("model.q")) {
    cfg.q_kind = parse_enum<QKind>(*e, "model.q",
                                   {{"none", QKind::None},
                                    {"constant", QKind::Constant},
                                    {"linear", QKind::Linear}});
  }
  set_d("model.q_value", cfg.q_value);
  set_d("model.q_scale", cfg.q_scale);
  set_d("model.q_center", cfg.q_center);

  set_d("kernel.epsilon", cfg.epsilon);
  set_d("kernel.epsilon_tilde", cfg.epsilon_tilde);

  set_d("particle.dt", cfg.particle_dt);
  set_d("particle.fixed_point_tol", cfg.fixed_point_tol);
  set_i("particle.max_fixed_point_iters", cfg.max_fixed_point_iters);
  if (const RawEntry* e = get("particle.weight_init")) {
    cfg.weight_init = parse_enum<WeightInit>(
        *e, "particle.weight_init",
        {{"nnls", WeightInit::Nnls}, {"simple", WeightInit::Simple}});
  }
  if (const RawEntry* e = get("particle.redistribution")) {
    cfg.redistribution = parse_enum<Redistribution>(
        *e, "particle.redistribution",
        {{"off", Redistribution::Off},
         {"every", Redistribution::Every},
         {"gap", Redistribution::Gap}});
  }
  set_l("particle.redistribution_period", cfg.redistribution_period);
  set_d("particle.redistribution_gap", cfg.redistribution_gap);

  set_d("fem.dt", cfg.fem_dt);
  set_d("fem.delta", cfg.fem_delta);
  set_d("fem.cutoff_eps", cfg.fem_cutoff_eps);
  set_d("fem.fp_tol", cfg.fem_fp_tol);
  set_i("fem.max_fp_iters", cfg.fem_max_fp_iters);

  if (const RawEntry* e = get("exact.enabled")) {
    cfg.exact_enabled = parse_bool(*e, "exact.enabled");
  }
  set_d("exact.t_star", cfg.t_star);
  set_d("exact.x0", cfg.x0);

  if (const RawEntry* e = get("initial.kind")) {
    cfg.initial_kind = parse_enum<InitialKind>(
        *e, "initial.kind",
        {{"exact_pair", InitialKind::ExactPair},
         {"gaussians", InitialKind::Gaussians}});
  }
  set_d("initial.sigma", cfg.sigma);
  set_d("initial.x1", cfg.x1);
  set_d("initial.x2", cfg.x2);
}

const char* kKnownKeys[] = {
    "run.method", "run.preset", "run.n", "run.t_final", "run.snapshot_times",
    "run.output_dir", "run.seed", "domain.xmin", "domain.xmax", "model.a11",
    "model.a12", "model.a21", "model.a22", "model.c1", "model.c2", "model.b1",
    "model.b2", "model.alpha1", "model.alpha2", "model.beta11", "model.beta12",
    "model.beta21", "model.beta22", "model.q", "model.q_value", "model.q_scale",
    "model.q_center", "kernel.epsilon", "kernel.epsilon_tilde", "particle.dt",
    "particle.fixed_point_tol", "particle.max_fixed_point_iters",
    "particle.weight_init", "particle.redistribution",
    "particle.redistribution_period", "particle.redistribution_gap", "fem.dt",
    "fem.delta", "fem.cutoff_eps", "fem.fp_tol", "fem.max_fp_iters",
    "exact.enabled", "exact.t_star", "exact.x0", "initial.kind", "initial.sigma",
    "initial.x1", "initial.x2"};

void check_known_keys(const RawMap& raw) {
  for (const auto& [key, entry] : raw) {
    bool known = false;
    for (const char* k : kKnownKeys) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unrecognized key '" + key + "'", entry.line, entry.column);
    }
  }
}

void validate(const RunConfig& cfg) {
  std::vector<std::string> bad;
  const bool particles_used = cfg.method != Method::Fem;
  const bool fem_used = cfg.method != Method::Particle;

  if (cfg.n < 2) bad.push_back("run.n");
  if (is_unset(cfg.t_final) || !(cfg.t_final > 0.0)) bad.push_back("run.t_final");
  if (is_unset(cfg.xmin) || is_unset(cfg.xmax) || !(cfg.xmin < cfg.xmax)) {
    bad.push_back("domain");
  }
  for (double t : cfg.snapshot_times) {
    if (!(t >= 0.0)) {
      bad.push_back("run.snapshot_times");
      break;
    }
  }

  auto nonneg = [&bad](double v, const char* name) {
    if (!(v >= 0.0)) bad.push_back(name);
  };
  nonneg(cfg.a11, "model.a11"); nonneg(cfg.a12, "model.a12");
  nonneg(cfg.a21, "model.a21"); nonneg(cfg.a22, "model.a22");
  nonneg(cfg.c1, "model.c1"); nonneg(cfg.c2, "model.c2");
  nonneg(cfg.alpha1, "model.alpha1"); nonneg(cfg.alpha2, "model.alpha2");
  nonneg(cfg.beta11, "model.beta11"); nonneg(cfg.beta12, "model.beta12");
  nonneg(cfg.beta21, "model.beta21"); nonneg(cfg.beta22, "model.beta22");

  if (particles_used) {
    if (is_unset(cfg.epsilon) || !(cfg.epsilon > 0.0)) bad.push_back("kernel.epsilon");
    if (!(cfg.epsilon_tilde > 0.0)) bad.push_back("kernel.epsilon_tilde");
    if (is_unset(cfg.particle_dt) || !(cfg.particle_dt > 0.0)) {
      bad.push_back("particle.dt");
    }
    if (!(cfg.fixed_point_tol > 0.0)) bad.push_back("particle.fixed_point_tol");
    if (cfg.max_fixed_point_iters < 1) bad.push_back("particle.max_fixed_point_iters");
    if (cfg.redistribution == Redistribution::Every && cfg.redistribution_period < 1) {
      bad.push_back("particle.redistribution_period");
    }
    if (cfg.redistribution == Redistribution::Gap && !(cfg.redistribution_gap > 0.0)) {
      bad.push_back("particle.redistribution_gap");
    }
  }
  if (fem_used) {
    if (is_unset(cfg.fem_dt) || !(cfg.fem_dt > 0.0)) bad.push_back("fem.dt");
    if (!(cfg.fem_delta >= 0.0)) bad.push_back("fem.delta");
    if (!(cfg.fem_cutoff_eps > 0.0)) bad.push_back("fem.cutoff_eps");
    if (!(cfg.fem_fp_tol > 0.0)) bad.push_back("fem.fp_tol");
    if (cfg.fem_max_fp_iters < 1) bad.push_back("fem.max_fp_iters");
  }
  if (cfg.exact_enabled) {
    if (!(cfg.t_star > 0.0)) {
      bad.push_back("exact.t_star");
    } else if (!(std::abs(cfg.x0) < exact::support_radius(cfg.t_star, 0.0))) {
      bad.push_back("exact.x0");
    }
  }
  if (cfg.initial_kind == InitialKind::ExactPair && !cfg.exact_enabled) {
    bad.push_back("initial.kind");
  }
  if (cfg.initial_kind == InitialKind::Gaussians && !(cfg.sigma > 0.0)) {
    bad.push_back("initial.sigma");
  }

  if (!bad.empty()) {
    std::string msg = "invalid configuration, offending fields:";
    for (const auto& f : bad) msg += " " + f;
    throw ValidationError(msg, bad);
  }
}

RunConfig resolve(const RawMap& raw) {
  check_known_keys(raw);
  Preset preset = Preset::Custom;
  if (auto it = raw.find("run.preset"); it != raw.end()) {
    preset = parse_enum<Preset>(it->second, "run.preset",
                                {{"exp1", Preset::Exp1},
                                 {"exp2a", Preset::Exp2A},
                                 {"exp2b", Preset::Exp2B},
                                 {"custom", Preset::Custom}});
  }
  int n = 1000;
  if (auto it = raw.find("run.n"); it != raw.end()) {
    n = int(parse_long(it->second, "run.n"));
  }
  RunConfig cfg = preset_defaults(preset, n);
  apply_overrides(cfg, raw);
  cfg.particle_dt = snap_dt(cfg.particle_dt, cfg.t_final);
  cfg.fem_dt = snap_dt(cfg.fem_dt, cfg.t_final);
  validate(cfg);
  return cfg;
}

}  // namespace

RunConfig load_config_text(const std::string& text,
                           const std::vector<std::pair<std::string, std::string>>&
                               overrides) {
  RawMap raw = tokenize(text);
  for (const auto& [key, value] : overrides) {
    raw[key] = RawEntry{value, 0, 0};
  }
  return resolve(raw);
}

RunConfig load_config_file(const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>&
                               overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str(), overrides);
}

model::ModelCoefficients RunConfig::model_coefficients() const {
  model::ModelCoefficients m;
  m.a11 = a11; m.a12 = a12; m.a21 = a21; m.a22 = a22;
  m.c1 = c1; m.c2 = c2;
  m.b1 = b1; m.b2 = b2;
  m.alpha1 = alpha1; m.alpha2 = alpha2;
  m.beta11 = beta11; m.beta12 = beta12; m.beta21 = beta21; m.beta22 = beta22;
  switch (q_kind) {
    case QKind::None: m.q = model::zero_drift(); break;
    case QKind::Constant: m.q = model::constant_drift(q_value); break;
    case QKind::Linear: m.q = model::linear_drift(q_scale, q_center); break;
  }
  m.validate();
  return m;
}

kernel::KernelConfig RunConfig::kernel_config() const {
  return kernel::KernelConfig(epsilon, epsilon_tilde);
}

std::function<double(double)> RunConfig::initial_u1() const {
  if (initial_kind == InitialKind::ExactPair) {
    const exact::ExactContactSolution sol(t_star, x0, 0.5 * (xmax - xmin));
    return [sol](double x) { return sol.pair_at(x, 0.0).first; };
  }
  const double center = x1, width = sigma;
  return [center, width](double x) {
    const double y = (x - center) / width;
    return std::exp(-y * y);
  };
}

std::function<double(double)> RunConfig::initial_u2() const {
  if (initial_kind == InitialKind::ExactPair) {
    const exact::ExactContactSolution sol(t_star, x0, 0.5 * (xmax - xmin));
    return [sol](double x) { return sol.pair_at(x, 0.0).second; };
  }
  const double center = x2, width = sigma;
  return [center, width](double x) {
    const double y = (x - center) / width;
    return std::exp(-y * y);
  };
}

long RunConfig::particle_steps() const {
  return std::lround(t_final / particle_dt);
}

long RunConfig::fem_steps() const { return std::lround(t_final / fem_dt); }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_manifest(const RunConfig& c) {
  std::ostringstream out;
  out << "[run]\n";
  out << "method = " << to_string(c.method) << "\n";
  out << "preset = " << to_string(c.preset) << "\n";
  out << "n = " << c.n << "\n";
  out << "t_final = " << fmt(c.t_final) << "\n";
  out << "snapshot_times =";
  for (double t : c.snapshot_times) out << " " << fmt(t);
  out << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  out << "seed = " << c.seed << "\n\n";

  out << "[domain]\n";
  out << "xmin = " << fmt(c.xmin) << "\n";
  out << "xmax = " << fmt(c.xmax) << "\n\n";

  out << "[model]\n";
  out << "a11 = " << fmt(c.a11) << "\n" << "a12 = " << fmt(c.a12) << "\n";
  out << "a21 = " << fmt(c.a21) << "\n" << "a22 = " << fmt(c.a22) << "\n";
  out << "c1 = " << fmt(c.c1) << "\n" << "c2 = " << fmt(c.c2) << "\n";
  out << "b1 = " << fmt(c.b1) << "\n" << "b2 = " << fmt(c.b2) << "\n";
  out << "alpha1 = " << fmt(c.alpha1) << "\n" << "alpha2 = " << fmt(c.alpha2) << "\n";
  out << "beta11 = " << fmt(c.beta11) << "\n" << "beta12 = " << fmt(c.beta12) << "\n";
  out << "beta21 = " << fmt(c.beta21) << "\n" << "beta22 = " << fmt(c.beta22) << "\n";
  out << "q = " << to_string(c.q_kind) << "\n";
  out << "q_value = " << fmt(c.q_value) << "\n";
  out << "q_scale = " << fmt(c.q_scale) << "\n";
  out << "q_center = " << fmt(c.q_center) << "\n\n";

  out << "[kernel]\n";
  out << "epsilon = " << fmt(c.epsilon) << "\n";
  out << "epsilon_tilde = " << fmt(c.epsilon_tilde) << "\n\n";

  out << "[particle]\n";
  out << "dt = " << fmt(c.particle_dt) << "\n";
  out << "fixed_point_tol = " << fmt(c.fixed_point_tol) << "\n";
  out << "max_fixed_point_iters = " << c.max_fixed_point_iters << "\n";
  out << "weight_init = " << to_string(c.weight_init) << "\n";
  out << "redistribution = " << to_string(c.redistribution) << "\n";
  out << "redistribution_period = " << c.redistribution_period << "\n";
  out << "redistribution_gap = " << fmt(c.redistribution_gap) << "\n\n";

  out << "[fem]\n";
  out << "dt = " << fmt(c.fem_dt) << "\n";
  out << "delta = " << fmt(c.fem_delta) << "\n";
  out << "cutoff_eps = " << fmt(c.fem_cutoff_eps) << "\n";
  out << "fp_tol = " << fmt(c.fem_fp_tol) << "\n";
  out << "max_fp_iters = " << c.fem_max_fp_iters << "\n\n";

  out << "[exact]\n";
  out << "enabled = " << (c.exact_enabled ? "true" : "false") << "\n";
  out << "t_star = " << fmt(c.t_star) << "\n";
  out << "x0 = " << fmt(c.x0) << "\n\n";

  out << "[initial]\n";
  out << "kind = " << to_string(c.initial_kind) << "\n";
  out << "sigma = " << fmt(c.sigma) << "\n";
  out << "x1 = " << fmt(c.x1) << "\n";
  out << "x2 = " << fmt(c.x2) << "\n";
  return out.str();
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Particle: return "particle";
    case Method::Fem: return "fem";
    case Method::Both: return "both";
  }
  return "?";
}
const char* to_string(Preset p) {
  switch (p) {
    case Preset::Exp1: return "exp1";
    case Preset::Exp2A: return "exp2a";
    case Preset::Exp2B: return "exp2b";
    case Preset::Custom: return "custom";
  }
  return "?";
}
const char* to_string(WeightInit w) {
  return w == WeightInit::Nnls ? "nnls" : "simple";
}
const char* to_string(Redistribution r) {
  switch (r) {
    case Redistribution::Off: return "off";
    case Redistribution::Every: return "every";
    case Redistribution::Gap: return "gap";
  }
  return "?";
}
const char* to_string(QKind q) {
  switch (q) {
    case QKind::None: return "none";
    case QKind::Constant: return "constant";
    case QKind::Linear: return "linear";
  }
  return "?";
}
const char* to_string(InitialKind k) {
  return k == InitialKind::ExactPair ? "exact_pair" : "gaussians";
}

}  // namespace crossdiff::config
