#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crossdiff/config.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/run.hpp"

using namespace crossdiff;
using config::Preset;
using config::RunConfig;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("preset arithmetic across resolutions") {
  for (int n : {50, 100, 200, 500, 1000}) {
    const double dx = 1.0 / n;
    const RunConfig e1 = config::preset_defaults(Preset::Exp1, n);
    CHECK(e1.epsilon == doctest::Approx(0.15 * std::pow(dx, 0.75)).epsilon(1e-14));
    CHECK(e1.particle_dt ==
          doctest::Approx(0.1 * e1.epsilon * e1.epsilon).epsilon(1e-14));
    CHECK(e1.xmin == -1.0);
    CHECK(e1.xmax == 1.0);
    CHECK(e1.t_final == 0.01);
    CHECK(e1.fem_delta == 0.0);
    CHECK(e1.a11 == 1.0);
    CHECK(e1.exact_enabled);
    CHECK(e1.t_star == 0.01);
    CHECK(e1.x0 == 0.0);

    for (Preset p : {Preset::Exp2A, Preset::Exp2B}) {
      const RunConfig e2 = config::preset_defaults(p, n);
      CHECK(e2.epsilon == doctest::Approx(0.5 * std::pow(dx, 0.75)).epsilon(1e-14));
      CHECK(e2.particle_dt ==
            doctest::Approx(0.5 * e2.epsilon * e2.epsilon).epsilon(1e-14));
      CHECK(e2.xmin == 0.0);
      CHECK(e2.xmax == 1.0);
      CHECK(e2.fem_delta == doctest::Approx(1e-3));
      CHECK(e2.sigma == doctest::Approx(0.001));
      CHECK(e2.x1 == doctest::Approx(0.4));
      CHECK(e2.x2 == doctest::Approx(0.6));
      CHECK(e2.q_kind == config::QKind::Linear);
      CHECK(e2.q_scale == doctest::Approx(-3.0));
      CHECK(e2.q_center == doctest::Approx(0.5));
    }
    const RunConfig a = config::preset_defaults(Preset::Exp2A, n);
    CHECK(a.a11 == 3.0);
    CHECK(a.a12 == 3.0);
    CHECK(a.a21 == 1.0);
    CHECK(a.b2 == 0.0);
    CHECK(a.t_final == 0.01);
    const RunConfig b = config::preset_defaults(Preset::Exp2B, n);
    CHECK(b.a11 == 1.0);
    CHECK(b.b1 == 1.0);
    CHECK(b.b2 == 10.0);
    CHECK(b.t_final == 0.02);
  }
}

TEST_CASE("resolved reference values at n = 1000") {
  const RunConfig e1 = config::load_config_text("[run]\npreset = exp1\nn = 1000\n");
  CHECK(e1.epsilon == doctest::Approx(8.4351e-4).epsilon(1e-3));
  CHECK(e1.particle_dt == doctest::Approx(7.1151e-8).epsilon(1e-3));
  const RunConfig e2 = config::load_config_text("[run]\npreset = exp2a\nn = 1000\n");
  CHECK(e2.epsilon == doctest::Approx(2.8117e-3).epsilon(1e-3));
  CHECK(e2.particle_dt == doctest::Approx(3.9529e-6).epsilon(1e-3));
}

TEST_CASE("time steps are snapped to divide the final time") {
  for (const char* text : {"[run]\npreset = exp1\nn = 200\n",
                           "[run]\npreset = exp2a\nn = 200\n",
                           "[run]\npreset = exp2b\nn = 128\n"}) {
    const RunConfig c = config::load_config_text(text);
    const double steps_p = c.t_final / c.particle_dt;
    const double steps_f = c.t_final / c.fem_dt;
    CHECK(steps_p == doctest::Approx(std::round(steps_p)).epsilon(1e-12));
    CHECK(steps_f == doctest::Approx(std::round(steps_f)).epsilon(1e-12));
    // snapping only shrinks dt, by less than one part per step count
    const RunConfig raw = config::preset_defaults(c.preset, c.n);
    CHECK(c.particle_dt <= raw.particle_dt * (1 + 1e-12));
    CHECK(c.particle_dt >= raw.particle_dt * (1 - 2.0 / steps_p));
  }
}

TEST_CASE("custom config without a domain names the domain") {
  try {
    config::load_config_text("[run]\npreset = custom\nmethod = fem\n"
                             "t_final = 0.01\n[fem]\ndt = 1e-3\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::find(e.fields.begin(), e.fields.end(), "domain") != e.fields.end());
  }
}

TEST_CASE("validation collects every violated field") {
  try {
    config::load_config_text(
        "[run]\npreset = exp1\nn = 200\n[model]\na11 = -1\nbeta12 = -3\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::find(e.fields.begin(), e.fields.end(), "model.a11") != e.fields.end());
    CHECK(std::find(e.fields.begin(), e.fields.end(), "model.beta12") !=
          e.fields.end());
  }
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("missing equals") {
    try {
      config::load_config_text("[run]\npreset exp1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("bad number") {
    try {
      config::load_config_text("[run]\npreset = exp1\nn = twelve\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);
      CHECK(e.column > 1);
    }
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(config::load_config_text("[run]\nmystery = 1\n"), ParseError);
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_AS(config::load_config_text("[run]\nn = 5\nn = 6\n"), ParseError);
  }
  SUBCASE("malformed section") {
    CHECK_THROWS_AS(config::load_config_text("[run\nn = 5\n"), ParseError);
  }
  SUBCASE("comments and blank lines are fine") {
    CHECK_NOTHROW(config::load_config_text(
        "# comment\n\n[run]\npreset = exp1 ; trailing\nn = 64\n"));
  }
}

TEST_CASE("manifest round-trips to an identical configuration") {
  const RunConfig cfg = config::load_config_text(
      "[run]\npreset = exp2b\nn = 150\nmethod = both\n"
      "snapshot_times = 0.005 0.01\n[initial]\nsigma = 0.02\n");
  const std::string manifest = config::to_manifest(cfg);
  const RunConfig back = config::load_config_text(manifest);
  CHECK(back == cfg);
}

TEST_CASE("cli-style overrides replace file values before resolution") {
  const RunConfig cfg = config::load_config_file("/dev/null",
                                                 {{"run.preset", "exp1"},
                                                  {"run.n", "80"},
                                                  {"run.method", "fem"}});
  CHECK(cfg.preset == Preset::Exp1);
  CHECK(cfg.n == 80);
  CHECK(cfg.method == config::Method::Fem);
}

TEST_CASE("runs are deterministic and the manifest reproduces them") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "crossdiff_cfg_test";
  fs::remove_all(base);
  const std::string text =
      "[run]\npreset = exp2a\nn = 40\nmethod = both\nt_final = 0.002\n"
      "snapshot_times = 0.001\n[initial]\nsigma = 0.05\n";

  auto cfg1 = config::load_config_text(
      text, {{"run.output_dir", (base / "a").string()}});
  auto cfg2 = config::load_config_text(
      text, {{"run.output_dir", (base / "b").string()}});
  const auto out1 = run::execute(cfg1);
  const auto out2 = run::execute(cfg2);

  REQUIRE(out1.files.size() == out2.files.size());
  int compared = 0;
  for (std::size_t i = 0; i < out1.files.size(); ++i) {
    if (out1.files[i].extension() != ".csv") continue;
    CHECK(slurp(out1.files[i]) == slurp(out2.files[i]));
    ++compared;
  }
  CHECK(compared >= 5);  // snapshots, finals and reports for both methods

  // manifest -> config -> identical resolved values (paths aside)
  const auto back = config::load_config_file((base / "a" / "manifest.ini").string());
  CHECK(back == cfg1);

  SUBCASE("empty snapshot list emits only finals, reports and the manifest") {
    auto cfg3 = config::load_config_text(
        "[run]\npreset = exp2a\nn = 40\nmethod = particle\nt_final = 0.001\n"
        "snapshot_times =\n[initial]\nsigma = 0.05\n",
        {{"run.output_dir", (base / "c").string()}});
    const auto out3 = run::execute(cfg3);
    bool saw_snapshot = false;
    for (const auto& f : out3.files) {
      if (f.filename().string().find("snapshot") != std::string::npos) {
        saw_snapshot = true;
      }
    }
    CHECK(!saw_snapshot);
    CHECK(fs::exists(base / "c" / "particle_final.csv"));
    CHECK(fs::exists(base / "c" / "report_particle.csv"));
    CHECK(fs::exists(base / "c" / "manifest.ini"));
  }
  fs::remove_all(base);
}

TEST_CASE("snapshot and report files carry the pinned schema") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "crossdiff_schema_test";
  fs::remove_all(base);
  auto cfg = config::load_config_text(
      "[run]\npreset = exp2a\nn = 32\nmethod = fem\nt_final = 0.001\n",
      {{"run.output_dir", base.string()}});
  run::execute(cfg);
  const std::string snap = slurp(base / "fem_final.csv");
  CHECK(snap.rfind("population,k,x,value\n", 0) == 0);
  CHECK(snap.find("\r") == std::string::npos);  // LF line endings
  const std::string report = slurp(base / "report_fem.csv");
  CHECK(report.rfind("time,e1,e2,mrse,m1,m2,entropy\n", 0) == 0);
  fs::remove_all(base);
}
