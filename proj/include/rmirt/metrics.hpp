#pragma once

#include <vector>

#include "rmirt/core.hpp"

namespace rmirt {

struct EvalReport {
  double mse = 0.0;
  std::vector<double> region_dice;     // per subscan
  std::vector<double> param_abs_error;  // n * M, subscan-major
  int iteration = 0;
};

/// Mean squared error over the whole grid.
double mse(const Image& x, const Image& x_true);

/// Dice overlap per subscan, 1 when both masks of a subscan are empty.
/// Throws DomainError on non-binary input.
std::vector<double> dice(const MaskStack& est, const MaskStack& truth);
double mean_dice(const MaskStack& est, const MaskStack& truth);

Vec param_error(const MotionParams& est, const MotionParams& ref);

}  // namespace rmirt
