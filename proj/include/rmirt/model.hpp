#pragma once

#include <vector>

#include "rmirt/core.hpp"
#include "rmirt/projector.hpp"
#include "rmirt/warp.hpp"

namespace rmirt {

/// Block system for n subscans: projector W_i per subscan and an affine
/// motion model M(p_i) about a shared center.
struct ModelConfig {
  GridGeom grid;
  ProjGeom proj_geom;
  std::vector<SubscanProjector> proj;
  MotionModel model_kind = MotionModel::scale2;

  ModelConfig(GridGeom grid, ProjGeom geom, MotionModel kind);

  int n_subscans() const noexcept { return static_cast<int>(proj.size()); }
  std::size_t sino_size() const noexcept;
};

/// Per-subscan sinogram blocks r_i = W_i x_i - b_i.
struct Residual {
  std::vector<Vec> blocks;

  double squared_norm() const;
};

/// Deformed object of subscan i: (1 - a_i) * x + M(p_i)(a_i * x).
Vec deformed_image(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                   const MotionParams& p, int subscan);

Sinogram forward(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                 const MotionParams& p);

Residual residual(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                  const MotionParams& p, const Sinogram& b);

/// f = 0.5 * ||r||^2.
double objective(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                 const MotionParams& p, const Sinogram& b);

/// All three gradients from one residual evaluation. Blocks listed in
/// `skip` are left empty.
struct Gradients {
  Vec x;      // N
  Vec alpha;  // n*N
  Vec p;      // n*M
};

struct GradientRequest {
  bool x = true;
  bool alpha = true;
  bool p = true;
};

Gradients gradients(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                    const MotionParams& p, const Residual& r,
                    GradientRequest want = {});

Vec grad_x(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
           const MotionParams& p, const Sinogram& b);
Vec grad_alpha(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
               const MotionParams& p, const Sinogram& b);
Vec grad_p(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
           const MotionParams& p, const Sinogram& b);

enum class FreeBlock { x, alpha, p };

struct ConvexityReport {
  std::vector<double> lambdas;
  std::vector<double> violations;  // f(mix) - (l f(a) + (1-l) f(b)), per lambda
  double max_violation = 0.0;
  double scale = 0.0;  // max(f(a), f(b))
};

/// Evaluates f along the segment between two values of one block, holding the
/// other two fixed, and reports the largest excess over the chord.
///
/// For the x and alpha blocks the objective is a convex quadratic, so the
/// violations are roundoff. The p block is not convex in general.
ConvexityReport restricted_quadratic_probe(const ModelConfig& cfg, const Sinogram& b,
                                           const Image& x, const MaskStack& alpha,
                                           const MotionParams& p, FreeBlock free,
                                           std::span<const double> end_a,
                                           std::span<const double> end_b,
                                           std::span<const double> lambdas);

}  // namespace rmirt
