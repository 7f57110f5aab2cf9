#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rmirt/core.hpp"
#include "rmirt/model.hpp"

namespace rmirt {

/// Stepsize bounds for one variable block. Zero means "derive automatically".
struct StepClamps {
  double min = 0.0;
  double max = 0.0;
};

struct SolverOptions {
  int n_iter = 30;

  // Reconstruction block. Automatic min is 1/L with L a power-iteration
  // estimate of ||W^T W||; automatic max is bb_max_factor * min.
  StepClamps x_steps;
  // Motion block. Automatic min is 1/L_p with L_p the Gauss-Newton trace
  // bound of the parameter Jacobian, taken at the first iterate where it is
  // positive.
  StepClamps p_steps;
  double bb_max_factor = 100.0;
  int power_iterations = 20;

  // gamma_alpha^i = alpha_step_scale / (i + 1). Zero calibrates the scale so
  // that the first nonzero region step has max-norm alpha_first_step.
  double alpha_step_scale = 0.0;
  double alpha_first_step = 0.25;

  bool tie_masks = false;
  double threshold = 0.5;
  bool update_center = true;
  bool gauss_seidel = false;

  bool freeze_x = false;
  bool freeze_alpha = false;
  bool freeze_p = false;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double dice_mean = std::numeric_limits<double>::quiet_NaN();
  double step_x = 0.0;
  double step_p = 0.0;
  double step_alpha = 0.0;
  GridPoint center;
  double grad_norm_x = 0.0;
  double grad_norm_alpha = 0.0;
  double grad_norm_p = 0.0;
};

struct SolverTrace {
  IterationRecord initial;                // state before the first update
  std::vector<IterationRecord> iterations;  // one per completed iteration
};

struct SolverState {
  Image x;
  MaskStack alpha;
  MotionParams p;
};

/// Optional references used only for trace metrics.
struct GroundTruthRef {
  const Image* x = nullptr;
  const MaskStack* mask = nullptr;
};

struct SolverResult {
  Image x;
  MaskStack alpha;          // binary read-out
  MaskStack alpha_relaxed;  // last continuous iterate
  MotionParams p;
  SolverTrace trace;
  double alpha_step_scale = 0.0;
  StepClamps x_steps;
  StepClamps p_steps;
};

/// Joint projected-gradient estimation of (x, alpha, p).
///
/// Each iteration takes, in order, a Barzilai-Borwein step on x followed by a
/// clip to [0,1], a Barzilai-Borwein step on p, and a 1/(i+1) step on alpha
/// followed by a clip to [0,1]. By default all three gradients are taken at
/// the iterate from the top of the loop; gauss_seidel refreshes them after
/// each block. The center of motion then moves to the last mask row of the
/// binarized alpha. Throws DivergenceError on a non-finite objective or gradient.
SolverResult run(const ModelConfig& cfg, const Sinogram& b, SolverState init,
                 const SolverOptions& opts, GroundTruthRef truth = {});

/// <dv, dg> / <dg, dg> clamped to [lo, hi]; lo when the quotient is undefined.
double bb_stepsize(std::span<const double> delta_var, std::span<const double> delta_grad,
                   StepClamps clamps);

void project_box(std::span<double> v);
Image project_box(Image x);

/// Nearest binary mask; ties at the threshold go to 1.
MaskStack project_binary(const MaskStack& alpha, double threshold = 0.5);

/// Row of the last nonzero pixel over all subscans, column at the grid center.
/// Returns `previous` for an empty mask.
GridPoint update_center(const MaskStack& binary_alpha, GridPoint previous);

/// Power-iteration estimate of the largest eigenvalue of sum_i W_i^T W_i.
double estimate_system_norm(const ModelConfig& cfg, int iterations = 20);

/// Trace bound on the Gauss-Newton curvature of f in p, maximized over subscans.
double estimate_param_curvature(const ModelConfig& cfg, const Image& x,
                                const MaskStack& alpha, const MotionParams& p);

}  // namespace rmirt
