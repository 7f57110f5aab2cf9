#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmirt {

/// Raised when array lengths or geometries of two operands disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a value lies outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the solver when an objective or gradient stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string block, int iteration);

  const std::string& block() const noexcept { return block_; }
  int iteration() const noexcept { return iteration_; }

 private:
  std::string block_;
  int iteration_;
};

using Vec = std::vector<double>;

/// Regular 2D pixel grid. Row index grows downward, column index to the right.
struct GridGeom {
  int width = 0;
  int height = 0;
  double pixel_size = 1.0;

  GridGeom() = default;
  GridGeom(int w, int h, double ps = 1.0);

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double center_col() const noexcept { return 0.5 * (width - 1); }
  double center_row() const noexcept { return 0.5 * (height - 1); }

  bool operator==(const GridGeom&) const = default;
};

/// Reference-frame attenuation image, row-major.
class Image {
 public:
  Image() = default;
  explicit Image(GridGeom geom);
  Image(GridGeom geom, Vec data);

  const GridGeom& geom() const noexcept { return geom_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const Vec& vec() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int row, int col) const { return data_[index(row, col)]; }
  double& operator()(int row, int col) { return data_[index(row, col)]; }

  bool in_unit_box() const noexcept;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * geom_.width + col;
  }

  GridGeom geom_;
  Vec data_;
};

/// n region encoders stored subscan-major. Values are relaxed to [0,1].
class MaskStack {
 public:
  MaskStack() = default;
  MaskStack(GridGeom geom, int n_subscans, double fill = 0.0);
  MaskStack(GridGeom geom, int n_subscans, Vec data);

  /// Stacks the same mask for every subscan.
  static MaskStack replicate(const Image& mask, int n_subscans);

  const GridGeom& geom() const noexcept { return geom_; }
  int n_subscans() const noexcept { return n_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const Vec& vec() const noexcept { return data_; }

  std::span<const double> block(int i) const;
  std::span<double> block(int i);

  bool is_binary() const noexcept;

 private:
  GridGeom geom_;
  int n_ = 0;
  Vec data_;
};

enum class MotionModel { scale2, scale_rot_trans };

/// Number of parameters per subscan for a motion model.
int param_count(MotionModel kind) noexcept;
/// Parameters of the identity (static) map.
Vec identity_params(MotionModel kind);
std::string to_string(MotionModel kind);
MotionModel motion_model_from_string(const std::string& name);
std::vector<std::string> param_names(MotionModel kind);

/// Grid position as (row, col).
struct GridPoint {
  double row = 0.0;
  double col = 0.0;
  bool operator==(const GridPoint&) const = default;
};

class MotionParams {
 public:
  MotionParams() = default;
  /// Identity parameters for every subscan.
  MotionParams(MotionModel kind, int n_subscans, GridPoint center);
  MotionParams(MotionModel kind, int n_subscans, Vec params, GridPoint center);

  MotionModel kind() const noexcept { return kind_; }
  int n_subscans() const noexcept { return n_; }
  int per_subscan() const noexcept { return param_count(kind_); }
  std::span<const double> data() const noexcept { return params_; }
  std::span<double> data() noexcept { return params_; }
  const Vec& vec() const noexcept { return params_; }
  std::span<const double> block(int i) const;
  std::span<double> block(int i);

  GridPoint center() const noexcept { return center_; }
  void set_center(GridPoint c) noexcept { center_ = c; }

  /// Throws DomainError if any scale is non-positive or any entry non-finite.
  void validate() const;

 private:
  MotionModel kind_ = MotionModel::scale2;
  int n_ = 0;
  Vec params_;
  GridPoint center_;
};

struct ProjGeom {
  Vec angles;  // radians
  int n_detectors = 0;
  double detector_spacing = 1.0;
  std::vector<int> subscan_bounds;  // n+1 angle indices

  ProjGeom() = default;
  ProjGeom(Vec angles, int n_detectors, double detector_spacing,
           std::vector<int> subscan_bounds);

  /// n_angles uniformly over [0, range), split into n equal contiguous subscans.
  static ProjGeom uniform(int n_angles, double range, int n_detectors,
                          double detector_spacing, int n_subscans);

  int n_angles() const noexcept { return static_cast<int>(angles.size()); }
  int n_subscans() const noexcept {
    return static_cast<int>(subscan_bounds.size()) - 1;
  }
  std::span<const double> subscan_angles(int i) const;
};

class Sinogram {
 public:
  Sinogram() = default;
  explicit Sinogram(ProjGeom geom);
  Sinogram(ProjGeom geom, Vec data);

  const ProjGeom& geom() const noexcept { return geom_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const Vec& vec() const noexcept { return data_; }

  std::span<const double> block(int subscan) const;
  std::span<double> block(int subscan);

 private:
  ProjGeom geom_;
  Vec data_;
};

/// Stacked elementwise products [alpha_1 * x; ...; alpha_n * x].
Vec penetrating_product(const MaskStack& alpha, const Image& x);

/// 1 - alpha elementwise.
MaskStack complement(const MaskStack& alpha);

// Small vector helpers shared by the numeric modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
bool all_finite(std::span<const double> a) noexcept;
void check_same_size(std::size_t a, std::size_t b, const char* what);
void check_block_index(int i, int n, const char* what);

}  // namespace rmirt
