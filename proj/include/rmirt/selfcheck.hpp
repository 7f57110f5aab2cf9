#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmirt/model.hpp"

namespace rmirt {

/// Small random problem (8x8 grid, two subscans of four angles) used by the
/// oracle checks. Iterates are strictly inside their boxes.
struct TinyInstance {
  ModelConfig cfg;
  Image x;
  MaskStack alpha;
  MotionParams p;
  Sinogram b;
};

TinyInstance make_tiny_instance(std::uint64_t seed, MotionModel kind = MotionModel::scale2);

/// Relative L2 error between an analytic gradient and central differences of
/// the objective, over every coordinate of the chosen block.
double gradient_fd_error(const TinyInstance& inst, FreeBlock block, double h);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // pass threshold on value
};

struct SelfcheckOptions {
  // Negative control: perturbs the backprojector used by the adjoint check.
  bool corrupt_adjoint = false;
};

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opts = {});

}  // namespace rmirt
