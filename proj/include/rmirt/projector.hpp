#pragma once

#include <span>

#include "rmirt/core.hpp"

namespace rmirt {

/// Parallel-beam system matrix for one subscan, applied matrix-free.
///
/// Rays follow Joseph's scheme: march one pixel at a time along the dominant
/// axis of the ray direction and linearly interpolate between the two
/// neighbouring pixels on the transverse axis. Samples outside the grid
/// read as zero. backproject() is the exact transpose of project().
///
/// Geometry: pixel (r, c) sits at world point
///   X = (c - (W-1)/2) * ps,  Y = ((H-1)/2 - r) * ps,
/// and detector bin k at angle theta collects the ray
///   X cos(theta) + Y sin(theta) = (k - (D-1)/2) * spacing.
class SubscanProjector {
 public:
  SubscanProjector(GridGeom grid, Vec angles, int n_detectors,
                   double detector_spacing);

  const GridGeom& grid() const noexcept { return grid_; }
  std::span<const double> angles() const noexcept { return angles_; }
  int n_angles() const noexcept { return static_cast<int>(angles_.size()); }
  int n_detectors() const noexcept { return n_det_; }
  double detector_spacing() const noexcept { return spacing_; }
  std::size_t range_size() const noexcept {
    return static_cast<std::size_t>(n_angles()) * n_det_;
  }

  /// Forward projection into `out` (n_angles * n_detectors, angle-major).
  void project(std::span<const double> img, std::span<double> out) const;
  Vec project(std::span<const double> img) const;
  Vec project(const Image& img) const;

  /// Adjoint of project(): splats each bin along its ray weights.
  void backproject(std::span<const double> sino, std::span<double> out) const;
  Vec backproject(std::span<const double> sino) const;

 private:
  template <class Visit>
  void trace_ray(int angle, int bin, Visit&& visit) const;

  GridGeom grid_;
  Vec angles_;
  int n_det_;
  double spacing_;
};

/// One projector per subscan of `geom`, sharing grid and detector layout.
std::vector<SubscanProjector> make_subscan_projectors(const GridGeom& grid,
                                                      const ProjGeom& geom);

/// Projects every angle of `geom` (all subscans) in one pass.
Sinogram project_all(const GridGeom& grid, const ProjGeom& geom, const Image& img);

}  // namespace rmirt
