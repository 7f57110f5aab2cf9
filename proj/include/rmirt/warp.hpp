#pragma once

#include <array>
#include <span>

#include "rmirt/core.hpp"

namespace rmirt {

/// u -> A (u - c) + c + t, in (x = column, y = row) grid coordinates.
struct AffineMap {
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  std::array<double, 2> offset{0.0, 0.0};            // (t_x, t_y)
  std::array<double, 2> center{0.0, 0.0};            // (c_x, c_y)

  double det() const noexcept { return linear[0] * linear[3] - linear[1] * linear[2]; }
  std::array<double, 2> apply(std::array<double, 2> u) const noexcept;
  /// Throws DomainError if the linear part is singular.
  std::array<double, 2> apply_inverse(std::array<double, 2> u) const;
};

AffineMap build_map(std::span<const double> params, MotionModel kind, GridPoint center);

/// Catmull-Rom kernel and its derivative.
double cubic_kernel(double s) noexcept;
double cubic_kernel_deriv(double s) noexcept;

/// out(u) = img(map^-1(u)) with Catmull-Rom interpolation, zero outside the grid.
void warp_apply(const AffineMap& map, const GridGeom& grid,
                std::span<const double> img, std::span<double> out);
Vec warp_apply(const AffineMap& map, const GridGeom& grid, std::span<const double> img);
Image warp_apply(const AffineMap& map, const Image& img);

/// Exact transpose of warp_apply for the same map.
void warp_adjoint(const AffineMap& map, const GridGeom& grid,
                  std::span<const double> img, std::span<double> out);
Vec warp_adjoint(const AffineMap& map, const GridGeom& grid, std::span<const double> img);

/// Derivatives of warp_apply(build_map(params), img) with respect to each
/// parameter. Returns param_count(kind) images, concatenated.
Vec warp_param_grad(std::span<const double> params, MotionModel kind,
                    GridPoint center, const GridGeom& grid,
                    std::span<const double> img);

}  // namespace rmirt
