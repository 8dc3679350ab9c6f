#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crossdiff/config.hpp"
#include "crossdiff/diagnostics.hpp"
#include "crossdiff/particles.hpp"

namespace crossdiff::run {

struct ReportRow {
  double time = 0;
  double e1 = 0, e2 = 0, mrse = 0;
  double m1 = 0, m2 = 0;
  double entropy = 0;
};

/// Outcome of one solver pipeline within a run.
struct PipelineOutput {
  diagnostics::GridFunctionPair final_sample;
  long steps = 0;
  int max_fixed_point_iterations = 0;
  long redistributions = 0;
  /// Per-population masses at t=0 and t=T (index-ordered sums for particles,
  /// lumped integrals for the finite-element states).
  double initial_mass[2] = {0, 0};
  double final_mass[2] = {0, 0};
  /// Particle runs only: whether every step left both mass sums bit-identical
  /// (redistribution steps reset the comparison baseline).
  bool mass_bit_identical = true;
  double seconds = 0;
};

struct RunOutput {
  config::RunConfig resolved;
  std::vector<double> grid;  // diagnostic grid = the N-point uniform grid
  std::optional<PipelineOutput> particle;
  std::optional<PipelineOutput> fem;
  std::optional<diagnostics::GridFunctionPair> exact_sample;  // at t_final
  std::vector<std::filesystem::path> files;
};

/// Execute the configured pipelines and write snapshots, error reports and
/// the manifest under the config's output directory. Deterministic: a given
/// config yields byte-identical CSVs.
RunOutput execute(const config::RunConfig& cfg);

/// Leftmost grid point, scanning right to left, where the reconstructed u1
/// exceeds u2; the discrete estimate of the contact interface.
std::optional<double> estimate_interface(const diagnostics::GridFunctionPair& s);

}  // namespace crossdiff::run
