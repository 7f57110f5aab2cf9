#include "rmirt/warp.hpp"

#include <cmath>

#include "rmirt/parallel.hpp"

namespace rmirt {

namespace {

struct Taps {
  int first = 0;  // grid index of the leftmost of the four taps
  std::array<double, 4> w{};
  std::array<double, 4> dw{};
};

Taps taps_at(double pos) noexcept {
  Taps t;
  const double f = std::floor(pos);
  t.first = static_cast<int>(f) - 1;
  for (int k = 0; k < 4; ++k) {
    const double s = pos - (t.first + k);
    t.w[k] = cubic_kernel(s);
    t.dw[k] = cubic_kernel_deriv(s);
  }
  return t;
}

std::array<double, 2> inverse_point(const AffineMap& m, int row, int col) {
  return m.apply_inverse({static_cast<double>(col), static_cast<double>(row)});
}

}  // namespace

std::array<double, 2> AffineMap::apply(std::array<double, 2> u) const noexcept {
  const double dx = u[0] - center[0];
  const double dy = u[1] - center[1];
  return {linear[0] * dx + linear[1] * dy + center[0] + offset[0],
          linear[2] * dx + linear[3] * dy + center[1] + offset[1]};
}

std::array<double, 2> AffineMap::apply_inverse(std::array<double, 2> u) const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("AffineMap: singular linear part");
  const double dx = u[0] - center[0] - offset[0];
  const double dy = u[1] - center[1] - offset[1];
  return {(linear[3] * dx - linear[1] * dy) / d + center[0],
          (-linear[2] * dx + linear[0] * dy) / d + center[1]};
}

AffineMap build_map(std::span<const double> p, MotionModel kind, GridPoint center) {
  if (p.size() != static_cast<std::size_t>(param_count(kind)))
    throw DimensionError("build_map: expected " + std::to_string(param_count(kind)) +
                         " parameters, got " + std::to_string(p.size()));
  if (!all_finite(p)) throw DomainError("build_map: non-finite parameter");
  if (!(p[0] > 0.0) || !(p[1] > 0.0)) throw DomainError("build_map: scale must be positive");
  AffineMap m;
  m.center = {center.col, center.row};
  if (kind == MotionModel::scale2) {
    m.linear = {p[0], 0.0, 0.0, p[1]};
    return m;
  }
  const double c = std::cos(p[2]);
  const double s = std::sin(p[2]);
  // R(theta) * diag(s_x, s_y)
  m.linear = {c * p[0], -s * p[1], s * p[0], c * p[1]};
  m.offset = {p[3], p[4]};
  return m;
}

double cubic_kernel(double s) noexcept {
  const double a = std::abs(s);
  if (a <= 1.0) return (1.5 * a - 2.5) * a * a + 1.0;
  if (a < 2.0) return ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0;
  return 0.0;
}

double cubic_kernel_deriv(double s) noexcept {
  const double a = std::abs(s);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (a <= 1.0) return sign * (4.5 * a - 5.0) * a;
  if (a < 2.0) return sign * ((-1.5 * a + 5.0) * a - 4.0);
  return 0.0;
}

void warp_apply(const AffineMap& map, const GridGeom& grid,
                std::span<const double> img, std::span<double> out) {
  check_same_size(img.size(), grid.size(), "warp_apply: input");
  check_same_size(out.size(), grid.size(), "warp_apply: output");
  if (map.det() == 0.0) throw DomainError("warp_apply: singular map");
  const int w = grid.width;
  const int h = grid.height;
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t r) {
    for (int c = 0; c < w; ++c) {
      const auto q = inverse_point(map, static_cast<int>(r), c);
      const Taps tx = taps_at(q[0]);
      const Taps ty = taps_at(q[1]);
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) {
        const int rr = ty.first + j;
        if (rr < 0 || rr >= h || ty.w[j] == 0.0) continue;
        double row_acc = 0.0;
        for (int i = 0; i < 4; ++i) {
          const int cc = tx.first + i;
          if (cc < 0 || cc >= w) continue;
          row_acc += tx.w[i] * img[static_cast<std::size_t>(rr) * w + cc];
        }
        acc += ty.w[j] * row_acc;
      }
      out[r * w + c] = acc;
    }
  });
}

Vec warp_apply(const AffineMap& map, const GridGeom& grid, std::span<const double> img) {
  Vec out(grid.size());
  warp_apply(map, grid, img, out);
  return out;
}

Image warp_apply(const AffineMap& map, const Image& img) {
  return Image(img.geom(), warp_apply(map, img.geom(), img.data()));
}

void warp_adjoint(const AffineMap& map, const GridGeom& grid,
                  std::span<const double> img, std::span<double> out) {
  check_same_size(img.size(), grid.size(), "warp_adjoint: input");
  check_same_size(out.size(), grid.size(), "warp_adjoint: output");
  if (map.det() == 0.0) throw DomainError("warp_adjoint: singular map");
  const int w = grid.width;
  const int h = grid.height;
  deterministic_scatter(
      static_cast<std::size_t>(h), out, [&](std::size_t r, std::span<double> buf) {
        for (int c = 0; c < w; ++c) {
          const double v = img[r * w + c];
          if (v == 0.0) continue;
          const auto q = inverse_point(map, static_cast<int>(r), c);
          const Taps tx = taps_at(q[0]);
          const Taps ty = taps_at(q[1]);
          for (int j = 0; j < 4; ++j) {
            const int rr = ty.first + j;
            if (rr < 0 || rr >= h || ty.w[j] == 0.0) continue;
            const double vj = ty.w[j] * v;
            for (int i = 0; i < 4; ++i) {
              const int cc = tx.first + i;
              if (cc < 0 || cc >= w) continue;
              buf[static_cast<std::size_t>(rr) * w + cc] += tx.w[i] * vj;
            }
          }
        }
      });
}

Vec warp_adjoint(const AffineMap& map, const GridGeom& grid, std::span<const double> img) {
  Vec out(grid.size());
  warp_adjoint(map, grid, img, out);
  return out;
}

Vec warp_param_grad(std::span<const double> p, MotionModel kind, GridPoint center,
                    const GridGeom& grid, std::span<const double> img) {
  check_same_size(img.size(), grid.size(), "warp_param_grad: input");
  const AffineMap map = build_map(p, kind, center);
  const int m = param_count(kind);
  const int w = grid.width;
  const int h = grid.height;
  const std::size_t n_pix = grid.size();
  const double sx = p[0];
  const double sy = p[1];
  const double ct = kind == MotionModel::scale2 ? 1.0 : std::cos(p[2]);
  const double st = kind == MotionModel::scale2 ? 0.0 : std::sin(p[2]);
  Vec out(n_pix * m, 0.0);

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t r) {
    for (int c = 0; c < w; ++c) {
      const auto q = inverse_point(map, static_cast<int>(r), c);
      const Taps tx = taps_at(q[0]);
      const Taps ty = taps_at(q[1]);
      double gx = 0.0;  // d interpolant / d x (column)
      double gy = 0.0;  // d interpolant / d y (row)
      for (int j = 0; j < 4; ++j) {
        const int rr = ty.first + j;
        if (rr < 0 || rr >= h) continue;
        double vw = 0.0;
        double vdw = 0.0;
        for (int i = 0; i < 4; ++i) {
          const int cc = tx.first + i;
          if (cc < 0 || cc >= w) continue;
          const double v = img[static_cast<std::size_t>(rr) * w + cc];
          vw += tx.w[i] * v;
          vdw += tx.dw[i] * v;
        }
        gx += ty.w[j] * vdw;
        gy += ty.dw[j] * vw;
      }
      // q = A^-1 (u - c - t) + c with A = R S; v = q - c.
      // dq/dsx = (-v_x/sx, 0), dq/dsy = (0, -v_y/sy),
      // dq/dtheta = (sy v_y / sx, -sx v_x / sy), dq/dt = -S^-1 R^T.
      const double vx = q[0] - map.center[0];
      const double vy = q[1] - map.center[1];
      const std::size_t idx = r * w + c;
      out[idx] = gx * (-vx / sx);
      out[n_pix + idx] = gy * (-vy / sy);
      if (m == 5) {
        out[2 * n_pix + idx] = gx * (sy * vy / sx) + gy * (-sx * vx / sy);
        // columns of -S^-1 R^T: d/dt_x = -(ct/sx, -st/sy), d/dt_y = -(st/sx, ct/sy)
        out[3 * n_pix + idx] = -(gx * ct / sx - gy * st / sy);
        out[4 * n_pix + idx] = -(gx * st / sx + gy * ct / sy);
      }
    }
  });
  return out;
}

}  // namespace rmirt
