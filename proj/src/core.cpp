#include "rmirt/core.hpp"

#include <algorithm>
#include <cmath>

namespace rmirt {

DivergenceError::DivergenceError(std::string block, int iteration)
    : std::runtime_error("non-finite " + block + " at iteration " +
                         std::to_string(iteration)),
      block_(std::move(block)),
      iteration_(iteration) {}

void check_block_index(int i, int n, const char* what) {
  if (i < 0 || i >= n)
    throw DimensionError(std::string(what) + ": block " + std::to_string(i) + " of " +
                         std::to_string(n));
}

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                         " does not match " + std::to_string(b));
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::isfinite(v); });
}

GridGeom::GridGeom(int w, int h, double ps) : width(w), height(h), pixel_size(ps) {
  if (w < 2 || h < 2) throw DomainError("grid must be at least 2x2");
  if (!(ps > 0.0) || !std::isfinite(ps))
    throw DomainError("pixel size must be positive");
}

Image::Image(GridGeom geom) : geom_(geom), data_(geom.size(), 0.0) {}

Image::Image(GridGeom geom, Vec data) : geom_(geom), data_(std::move(data)) {
  check_same_size(data_.size(), geom_.size(), "Image");
  if (!all_finite(data_)) throw DomainError("Image: non-finite value");
}

bool Image::in_unit_box() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

MaskStack::MaskStack(GridGeom geom, int n_subscans, double fill)
    : geom_(geom), n_(n_subscans) {
  if (n_subscans < 1) throw DimensionError("MaskStack: need at least one subscan");
  if (!(fill >= 0.0 && fill <= 1.0)) throw DomainError("MaskStack: fill outside [0,1]");
  data_.assign(geom.size() * n_subscans, fill);
}

MaskStack::MaskStack(GridGeom geom, int n_subscans, Vec data)
    : geom_(geom), n_(n_subscans), data_(std::move(data)) {
  if (n_subscans < 1) throw DimensionError("MaskStack: need at least one subscan");
  check_same_size(data_.size(), geom_.size() * n_subscans, "MaskStack");
  for (double v : data_)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("MaskStack: value outside [0,1]");
}

MaskStack MaskStack::replicate(const Image& mask, int n_subscans) {
  Vec data;
  data.reserve(mask.size() * n_subscans);
  for (int i = 0; i < n_subscans; ++i)
    data.insert(data.end(), mask.vec().begin(), mask.vec().end());
  return MaskStack(mask.geom(), n_subscans, std::move(data));
}

std::span<const double> MaskStack::block(int i) const {
  check_block_index(i, n_, "MaskStack");
  return std::span<const double>(data_).subspan(i * geom_.size(), geom_.size());
}

std::span<double> MaskStack::block(int i) {
  check_block_index(i, n_, "MaskStack");
  return std::span<double>(data_).subspan(i * geom_.size(), geom_.size());
}

bool MaskStack::is_binary() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

int param_count(MotionModel kind) noexcept {
  return kind == MotionModel::scale2 ? 2 : 5;
}

Vec identity_params(MotionModel kind) {
  if (kind == MotionModel::scale2) return {1.0, 1.0};
  return {1.0, 1.0, 0.0, 0.0, 0.0};
}

std::string to_string(MotionModel kind) {
  return kind == MotionModel::scale2 ? "scale2" : "scale_rot_trans";
}

MotionModel motion_model_from_string(const std::string& name) {
  if (name == "scale2") return MotionModel::scale2;
  if (name == "scale_rot_trans") return MotionModel::scale_rot_trans;
  throw DomainError("unknown motion model '" + name + "'");
}

std::vector<std::string> param_names(MotionModel kind) {
  if (kind == MotionModel::scale2) return {"s_x", "s_y"};
  return {"s_x", "s_y", "theta", "t_x", "t_y"};
}

MotionParams::MotionParams(MotionModel kind, int n_subscans, GridPoint center)
    : kind_(kind), n_(n_subscans), center_(center) {
  if (n_subscans < 1) throw DimensionError("MotionParams: need at least one subscan");
  const Vec id = identity_params(kind);
  for (int i = 0; i < n_subscans; ++i) params_.insert(params_.end(), id.begin(), id.end());
}

MotionParams::MotionParams(MotionModel kind, int n_subscans, Vec params,
                           GridPoint center)
    : kind_(kind), n_(n_subscans), params_(std::move(params)), center_(center) {
  if (n_subscans < 1) throw DimensionError("MotionParams: need at least one subscan");
  check_same_size(params_.size(),
                  static_cast<std::size_t>(n_subscans * param_count(kind)),
                  "MotionParams");
  validate();
}

std::span<const double> MotionParams::block(int i) const {
  check_block_index(i, n_, "MotionParams");
  const int m = per_subscan();
  return std::span<const double>(params_).subspan(i * m, m);
}

std::span<double> MotionParams::block(int i) {
  check_block_index(i, n_, "MotionParams");
  const int m = per_subscan();
  return std::span<double>(params_).subspan(i * m, m);
}

void MotionParams::validate() const {
  if (!all_finite(params_) || !std::isfinite(center_.row) ||
      !std::isfinite(center_.col))
    throw DomainError("MotionParams: non-finite entry");
  for (int i = 0; i < n_; ++i) {
    auto b = block(i);
    if (!(b[0] > 0.0) || !(b[1] > 0.0))
      throw DomainError("MotionParams: scale must be positive (subscan " +
                        std::to_string(i) + ")");
  }
}

ProjGeom::ProjGeom(Vec angles_, int n_det, double spacing, std::vector<int> bounds)
    : angles(std::move(angles_)),
      n_detectors(n_det),
      detector_spacing(spacing),
      subscan_bounds(std::move(bounds)) {
  if (angles.empty()) throw DimensionError("ProjGeom: no angles");
  if (n_detectors < 1) throw DimensionError("ProjGeom: no detectors");
  if (!(detector_spacing > 0.0)) throw DomainError("ProjGeom: spacing must be positive");
  for (std::size_t k = 1; k < angles.size(); ++k)
    if (!(angles[k] > angles[k - 1]))
      throw DomainError("ProjGeom: angles must be strictly increasing");
  if (subscan_bounds.size() < 2 || subscan_bounds.front() != 0 ||
      subscan_bounds.back() != n_angles())
    throw DimensionError("ProjGeom: subscan bounds must span [0, n_angles]");
  for (std::size_t k = 1; k < subscan_bounds.size(); ++k)
    if (subscan_bounds[k] <= subscan_bounds[k - 1])
      throw DimensionError("ProjGeom: empty subscan");
}

ProjGeom ProjGeom::uniform(int n_angles, double range, int n_detectors,
                           double detector_spacing, int n_subscans) {
  if (n_angles < 1 || n_subscans < 1 || n_subscans > n_angles)
    throw DimensionError("ProjGeom::uniform: need 1 <= n_subscans <= n_angles");
  Vec angles(n_angles);
  for (int k = 0; k < n_angles; ++k) angles[k] = range * k / n_angles;
  std::vector<int> bounds(n_subscans + 1);
  for (int i = 0; i <= n_subscans; ++i) bounds[i] = i * n_angles / n_subscans;
  return ProjGeom(std::move(angles), n_detectors, detector_spacing, std::move(bounds));
}

std::span<const double> ProjGeom::subscan_angles(int i) const {
  return std::span<const double>(angles).subspan(
      subscan_bounds[i], subscan_bounds[i + 1] - subscan_bounds[i]);
}

Sinogram::Sinogram(ProjGeom geom)
    : geom_(std::move(geom)),
      data_(static_cast<std::size_t>(geom_.n_angles()) * geom_.n_detectors, 0.0) {}

Sinogram::Sinogram(ProjGeom geom, Vec data)
    : geom_(std::move(geom)), data_(std::move(data)) {
  check_same_size(data_.size(),
                  static_cast<std::size_t>(geom_.n_angles()) * geom_.n_detectors,
                  "Sinogram");
  if (!all_finite(data_)) throw DomainError("Sinogram: non-finite value");
}

std::span<const double> Sinogram::block(int i) const {
  check_block_index(i, geom_.n_subscans(), "Sinogram");
  const auto lo = static_cast<std::size_t>(geom_.subscan_bounds[i]) * geom_.n_detectors;
  const auto hi = static_cast<std::size_t>(geom_.subscan_bounds[i + 1]) * geom_.n_detectors;
  return std::span<const double>(data_).subspan(lo, hi - lo);
}

std::span<double> Sinogram::block(int i) {
  check_block_index(i, geom_.n_subscans(), "Sinogram");
  const auto lo = static_cast<std::size_t>(geom_.subscan_bounds[i]) * geom_.n_detectors;
  const auto hi = static_cast<std::size_t>(geom_.subscan_bounds[i + 1]) * geom_.n_detectors;
  return std::span<double>(data_).subspan(lo, hi - lo);
}

Vec penetrating_product(const MaskStack& alpha, const Image& x) {
  if (!(alpha.geom() == x.geom()))
    throw DimensionError("penetrating_product: mask and image grids differ");
  const std::size_t n_pix = x.size();
  Vec out(alpha.vec().size());
  for (int i = 0; i < alpha.n_subscans(); ++i) {
    auto a = alpha.block(i);
    for (std::size_t k = 0; k < n_pix; ++k) out[i * n_pix + k] = a[k] * x.vec()[k];
  }
  return out;
}

MaskStack complement(const MaskStack& alpha) {
  Vec out(alpha.vec().size());
  std::transform(alpha.vec().begin(), alpha.vec().end(), out.begin(),
                 [](double a) { return 1.0 - a; });
  return MaskStack(alpha.geom(), alpha.n_subscans(), std::move(out));
}

}  // namespace rmirt
