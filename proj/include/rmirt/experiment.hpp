#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmirt/config.hpp"
#include "rmirt/optimizer.hpp"
#include "rmirt/sim.hpp"

namespace rmirt {

struct RunOverrides {
  std::optional<std::uint64_t> seed;  // replaces the noise seed
  std::optional<std::string> output_dir;
};

struct VariantOutcome {
  Variant variant = Variant::rmirt;
  SolverResult result;
  double final_mse = 0.0;
  std::vector<double> dice;
  Vec param_abs_error;
};

struct ExperimentOutcome {
  GroundTruth truth;
  Image x_init;               // x0 shared by every variant
  MaskStack alpha_init;       // initial region guess for rmirt
  GridPoint true_center;
  std::vector<VariantOutcome> variants;
  std::vector<std::string> files;  // every file written, relative to output dir

  const VariantOutcome* find(Variant v) const;
};

/// Simulates the configured scan and reconstructs it with each requested
/// variant on identical data:
///   none   - x only, alpha = 0 (no motion compensation)
///   global - x and p, alpha = 1 (whole-object motion)
///   rmirt  - x, p and alpha from the grown initial region
/// Nothing is written when `write_outputs` is false.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov = {},
                                 bool write_outputs = true);

/// Combined per-iteration table, one row per (variant, iteration).
std::string metrics_table(const ExperimentOutcome& out);

}  // namespace rmirt
