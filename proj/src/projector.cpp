#include "rmirt/projector.hpp"

#include <cmath>

#include "rmirt/parallel.hpp"

namespace rmirt {

SubscanProjector::SubscanProjector(GridGeom grid, Vec angles, int n_detectors,
                                   double detector_spacing)
    : grid_(grid), angles_(std::move(angles)), n_det_(n_detectors),
      spacing_(detector_spacing) {
  if (angles_.empty()) throw DimensionError("SubscanProjector: no angles");
  if (n_det_ < 1 || !(spacing_ > 0.0))
    throw DomainError("SubscanProjector: invalid detector layout");
  const double diag = std::hypot(grid_.width, grid_.height) * grid_.pixel_size;
  if (n_det_ * spacing_ < diag)
    throw DomainError("SubscanProjector: detector does not cover the grid diagonal");
}

// Calls visit(pixel_index, weight) for every nonzero coefficient of the ray.
template <class Visit>
void SubscanProjector::trace_ray(int angle, int bin, Visit&& visit) const {
  const double theta = angles_[angle];
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double ps = grid_.pixel_size;
  const double t = (bin - 0.5 * (n_det_ - 1)) * spacing_;
  const int w = grid_.width;
  const int h = grid_.height;
  const double cc = grid_.center_col();
  const double cr = grid_.center_row();

  if (std::abs(c) >= std::abs(s)) {
    // March over rows; X = (t - Y s) / c.
    const double step = ps / std::abs(c);
    for (int r = 0; r < h; ++r) {
      const double y = (cr - r) * ps;
      const double col = (t - y * s) / c / ps + cc;
      const double f = std::floor(col);
      const int c0 = static_cast<int>(f);
      const double frac = col - f;
      const std::size_t row_base = static_cast<std::size_t>(r) * w;
      if (c0 >= 0 && c0 < w) visit(row_base + c0, step * (1.0 - frac));
      if (c0 + 1 >= 0 && c0 + 1 < w && frac > 0.0) visit(row_base + c0 + 1, step * frac);
    }
  } else {
    // March over columns; Y = (t - X c) / s.
    const double step = ps / std::abs(s);
    for (int col = 0; col < w; ++col) {
      const double x = (col - cc) * ps;
      const double row = cr - (t - x * c) / s / ps;
      const double f = std::floor(row);
      const int r0 = static_cast<int>(f);
      const double frac = row - f;
      if (r0 >= 0 && r0 < h) visit(static_cast<std::size_t>(r0) * w + col, step * (1.0 - frac));
      if (r0 + 1 >= 0 && r0 + 1 < h && frac > 0.0)
        visit(static_cast<std::size_t>(r0 + 1) * w + col, step * frac);
    }
  }
}

void SubscanProjector::project(std::span<const double> img, std::span<double> out) const {
  check_same_size(img.size(), grid_.size(), "project: image");
  check_same_size(out.size(), range_size(), "project: sinogram");
  parallel_for(static_cast<std::size_t>(n_angles()), [&](std::size_t a) {
    for (int d = 0; d < n_det_; ++d) {
      double acc = 0.0;
      trace_ray(static_cast<int>(a), d,
                [&](std::size_t idx, double wgt) { acc += wgt * img[idx]; });
      out[a * n_det_ + d] = acc;
    }
  });
}

Vec SubscanProjector::project(std::span<const double> img) const {
  Vec out(range_size());
  project(img, out);
  return out;
}

Vec SubscanProjector::project(const Image& img) const {
  if (!(img.geom() == grid_)) throw DimensionError("project: grid mismatch");
  return project(img.data());
}

void SubscanProjector::backproject(std::span<const double> sino,
                                   std::span<double> out) const {
  check_same_size(sino.size(), range_size(), "backproject: sinogram");
  check_same_size(out.size(), grid_.size(), "backproject: image");
  deterministic_scatter(
      static_cast<std::size_t>(n_angles()), out,
      [&](std::size_t a, std::span<double> buf) {
        for (int d = 0; d < n_det_; ++d) {
          const double v = sino[a * n_det_ + d];
          if (v == 0.0) continue;
          trace_ray(static_cast<int>(a), d,
                    [&](std::size_t idx, double wgt) { buf[idx] += wgt * v; });
        }
      });
}

Vec SubscanProjector::backproject(std::span<const double> sino) const {
  Vec out(grid_.size());
  backproject(sino, out);
  return out;
}

std::vector<SubscanProjector> make_subscan_projectors(const GridGeom& grid,
                                                      const ProjGeom& geom) {
  std::vector<SubscanProjector> out;
  out.reserve(geom.n_subscans());
  for (int i = 0; i < geom.n_subscans(); ++i) {
    auto a = geom.subscan_angles(i);
    out.emplace_back(grid, Vec(a.begin(), a.end()), geom.n_detectors,
                     geom.detector_spacing);
  }
  return out;
}

Sinogram project_all(const GridGeom& grid, const ProjGeom& geom, const Image& img) {
  SubscanProjector all(grid, geom.angles, geom.n_detectors, geom.detector_spacing);
  return Sinogram(geom, all.project(img));
}

}  // namespace rmirt
