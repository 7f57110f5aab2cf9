#pragma once

#include <cstdint>

#include "rmirt/core.hpp"

namespace rmirt {

enum class PhantomStructure { textured_disk, layered_disk };

PhantomStructure phantom_structure_from_string(const std::string& name);

/// Disk phantom whose lowest `static_band_rows` image rows never move. The
/// in-disk pixels above the band form the deformable region.
struct PhantomSpec {
  GridGeom geom;
  int static_band_rows = 0;
  std::uint64_t texture_seed = 0;
  PhantomStructure structure = PhantomStructure::textured_disk;
  double radius_fraction = 0.34;  // disk radius relative to min(width, height)

  void validate() const;
};

struct Phantom {
  Image image;   // values in [0,1]
  Image region;  // binary deformable region
};

Phantom make_phantom(const PhantomSpec& spec);

/// First row of the static band.
int static_boundary_row(const PhantomSpec& spec);

/// Pixels of `support` reachable from `region` by moving at most `rows` rows
/// down the image. Used to build the imperfect initial region guess.
Image grow_region_rows(const Image& region, const Image& support, int rows);

enum class Schedule { linear, piecewise_constant };

/// Continuous motion over the scan. Scan time tau runs over [0,1]; angle k of
/// n is acquired at tau = (k + 0.5) / n.
struct MotionTimeline {
  MotionModel kind = MotionModel::scale2;
  Vec start;
  Vec end;
  GridPoint center;
  Schedule schedule = Schedule::linear;

  void validate() const;
  Vec at(double tau) const;
  /// Parameters in force while angle `k` of `geom` is acquired.
  Vec for_angle(const ProjGeom& geom, int k) const;
};

/// Projects each angle through the object deformed with that angle's
/// parameters: (1 - mask) * x + M(p_k)(mask * x).
Sinogram simulate_dynamic_sinogram(const Image& x_true, const Image& mask_true,
                                   const MotionTimeline& timeline, const ProjGeom& geom);

/// Adds i.i.d. Gaussian noise with sigma = sigma_fraction * max(sino).
Sinogram add_noise(const Sinogram& sino, double sigma_fraction, std::uint64_t seed);

/// Timeline parameters at each subscan's temporal midpoint.
MotionParams subscan_representative_params(const MotionTimeline& timeline,
                                           const ProjGeom& geom);

struct GroundTruth {
  Image x_true;
  MaskStack mask_true;
  MotionParams p_true_subscan;
  Sinogram clean;
  Sinogram noisy;
};

GroundTruth simulate_experiment(const PhantomSpec& phantom, const MotionTimeline& timeline,
                                const ProjGeom& geom, double sigma_fraction,
                                std::uint64_t noise_seed);

}  // namespace rmirt
