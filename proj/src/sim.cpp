#include "rmirt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rmirt/parallel.hpp"
#include "rmirt/projector.hpp"
#include "rmirt/warp.hpp"

namespace rmirt {

PhantomStructure phantom_structure_from_string(const std::string& name) {
  if (name == "textured_disk") return PhantomStructure::textured_disk;
  if (name == "layered_disk") return PhantomStructure::layered_disk;
  throw DomainError("unknown phantom structure '" + name + "'");
}

void PhantomSpec::validate() const {
  if (static_band_rows < 0 || static_band_rows >= geom.height)
    throw DomainError("phantom: static_band_rows must lie in [0, height)");
  if (!(radius_fraction > 0.0 && radius_fraction <= 0.5))
    throw DomainError("phantom: radius_fraction must lie in (0, 0.5]");
}

int static_boundary_row(const PhantomSpec& spec) {
  return spec.geom.height - spec.static_band_rows;
}

namespace {

constexpr int kSuper = 4;

// Fraction of pixel (r, c) covered by the disk, from kSuper^2 subsamples.
double disk_coverage(int r, int c, double cr, double cc, double radius) {
  int hits = 0;
  for (int i = 0; i < kSuper; ++i)
    for (int j = 0; j < kSuper; ++j) {
      const double y = r - 0.5 + (i + 0.5) / kSuper;
      const double x = c - 0.5 + (j + 0.5) / kSuper;
      if ((y - cr) * (y - cr) + (x - cc) * (x - cc) <= radius * radius) ++hits;
    }
  return static_cast<double>(hits) / (kSuper * kSuper);
}

void paint_disk(Image& img, double cr, double cc, double radius, double value) {
  const auto& g = img.geom();
  const int r0 = std::max(0, static_cast<int>(std::floor(cr - radius - 1)));
  const int r1 = std::min(g.height - 1, static_cast<int>(std::ceil(cr + radius + 1)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cc - radius - 1)));
  const int c1 = std::min(g.width - 1, static_cast<int>(std::ceil(cc + radius + 1)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const double cov = disk_coverage(r, c, cr, cc, radius);
      if (cov > 0.0) img(r, c) = (1.0 - cov) * img(r, c) + cov * value;
    }
}

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const auto& g = spec.geom;
  const double cr = g.center_row();
  const double cc = g.center_col();
  const double radius = spec.radius_fraction * std::min(g.width, g.height);

  Image outline(g);
  paint_disk(outline, cr, cc, radius, 1.0);

  Image img(g);
  if (spec.structure == PhantomStructure::layered_disk) {
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c)
        img(r, c) = outline(r, c) * (((r / 8) % 2 == 0) ? 0.35 : 0.8);
  } else {
    for (std::size_t k = 0; k < img.size(); ++k) img.data()[k] = 0.4 * outline.vec()[k];
    std::mt19937_64 rng(spec.texture_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n_blobs = std::max(4, static_cast<int>(radius * radius / 60.0));
    for (int b = 0; b < n_blobs; ++b) {
      const double rho = radius * 0.85 * std::sqrt(unit(rng));
      const double phi = 2.0 * 3.14159265358979323846 * unit(rng);
      const double br = 0.04 * radius + 0.08 * radius * unit(rng);
      const bool pore = unit(rng) < 0.35;
      const double value = pore ? 0.05 + 0.1 * unit(rng) : 0.65 + 0.35 * unit(rng);
      paint_disk(img, cr + rho * std::sin(phi), cc + rho * std::cos(phi), br, value);
    }
    // Blobs never leak outside the outline.
    for (std::size_t k = 0; k < img.size(); ++k)
      img.data()[k] = std::min(img.vec()[k], outline.vec()[k]);
  }

  Image region(g);
  const int boundary = static_boundary_row(spec);
  for (int r = 0; r < boundary; ++r)
    for (int c = 0; c < g.width; ++c) region(r, c) = img(r, c) > 0.0 ? 1.0 : 0.0;
  return {std::move(img), std::move(region)};
}

Image grow_region_rows(const Image& region, const Image& support, int rows) {
  if (!(region.geom() == support.geom())) throw DimensionError("grow_region_rows: grid mismatch");
  const auto& g = region.geom();
  Image out(g);
  for (int c = 0; c < g.width; ++c)
    for (int r = 0; r < g.height; ++r) {
      if (region(r, c) != 0.0) {
        out(r, c) = 1.0;
        continue;
      }
      if (support(r, c) == 0.0) continue;
      for (int k = 1; k <= rows && r - k >= 0; ++k)
        if (region(r - k, c) != 0.0) {
          out(r, c) = 1.0;
          break;
        }
    }
  return out;
}

void MotionTimeline::validate() const {
  const auto m = static_cast<std::size_t>(param_count(kind));
  if (start.size() != m || end.size() != m)
    throw DimensionError("timeline: parameter vectors must have " + std::to_string(m) +
                         " entries");
  if (!(start[0] > 0 && start[1] > 0 && end[0] > 0 && end[1] > 0))
    throw DomainError("timeline: scales must be positive");
}

Vec MotionTimeline::at(double tau) const {
  Vec out(start.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = start[j] + (end[j] - start[j]) * tau;
  return out;
}

Vec MotionTimeline::for_angle(const ProjGeom& geom, int k) const {
  const double n = geom.n_angles();
  if (schedule == Schedule::linear) return at((k + 0.5) / n);
  int i = 0;
  while (geom.subscan_bounds[i + 1] <= k) ++i;
  return at(0.5 * (geom.subscan_bounds[i] + geom.subscan_bounds[i + 1]) / n);
}

Sinogram simulate_dynamic_sinogram(const Image& x_true, const Image& mask_true,
                                   const MotionTimeline& timeline, const ProjGeom& geom) {
  if (!(x_true.geom() == mask_true.geom()))
    throw DimensionError("simulate: image and mask grids differ");
  timeline.validate();
  const auto& grid = x_true.geom();
  const std::size_t n_pix = grid.size();
  Vec masked(n_pix), still(n_pix);
  for (std::size_t k = 0; k < n_pix; ++k) {
    masked[k] = mask_true.vec()[k] * x_true.vec()[k];
    still[k] = (1.0 - mask_true.vec()[k]) * x_true.vec()[k];
  }
  Sinogram out(geom);
  const int n_det = geom.n_detectors;
  for (int k = 0; k < geom.n_angles(); ++k) {
    const Vec pk = timeline.for_angle(geom, k);
    Vec deformed = warp_apply(build_map(pk, timeline.kind, timeline.center), grid, masked);
    for (std::size_t q = 0; q < n_pix; ++q) deformed[q] += still[q];
    SubscanProjector one(grid, {geom.angles[k]}, n_det, geom.detector_spacing);
    one.project(deformed, out.data().subspan(static_cast<std::size_t>(k) * n_det, n_det));
  }
  return out;
}

Sinogram add_noise(const Sinogram& sino, double sigma_fraction, std::uint64_t seed) {
  if (!(sigma_fraction >= 0.0)) throw DomainError("add_noise: sigma_fraction must be >= 0");
  Sinogram out = sino;
  if (sigma_fraction == 0.0) return out;
  const double peak = *std::max_element(sino.vec().begin(), sino.vec().end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma_fraction * peak);
  for (double& v : out.data()) v += normal(rng);
  return out;
}

MotionParams subscan_representative_params(const MotionTimeline& timeline,
                                           const ProjGeom& geom) {
  timeline.validate();
  const int n = geom.n_subscans();
  Vec params;
  for (int i = 0; i < n; ++i) {
    const double tau =
        0.5 * (geom.subscan_bounds[i] + geom.subscan_bounds[i + 1]) / geom.n_angles();
    const Vec pi = timeline.at(tau);
    params.insert(params.end(), pi.begin(), pi.end());
  }
  return MotionParams(timeline.kind, n, std::move(params), timeline.center);
}

GroundTruth simulate_experiment(const PhantomSpec& phantom, const MotionTimeline& timeline,
                                const ProjGeom& geom, double sigma_fraction,
                                std::uint64_t noise_seed) {
  Phantom ph = make_phantom(phantom);
  Sinogram clean = simulate_dynamic_sinogram(ph.image, ph.region, timeline, geom);
  Sinogram noisy = add_noise(clean, sigma_fraction, noise_seed);
  return {ph.image, MaskStack::replicate(ph.region, geom.n_subscans()),
          subscan_representative_params(timeline, geom), std::move(clean), std::move(noisy)};
}

}  // namespace rmirt
