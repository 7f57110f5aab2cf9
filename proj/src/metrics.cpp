#include "rmirt/metrics.hpp"

#include <cmath>
#include <numeric>

namespace rmirt {

double mse(const Image& x, const Image& x_true) {
  if (!(x.geom() == x_true.geom())) throw DimensionError("mse: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x.vec()[k] - x_true.vec()[k];
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

std::vector<double> dice(const MaskStack& est, const MaskStack& truth) {
  if (!(est.geom() == truth.geom()) || est.n_subscans() != truth.n_subscans())
    throw DimensionError("dice: mask shapes differ");
  if (!est.is_binary() || !truth.is_binary()) throw DomainError("dice: masks must be binary");
  std::vector<double> out(est.n_subscans());
  for (int i = 0; i < est.n_subscans(); ++i) {
    auto a = est.block(i);
    auto b = truth.block(i);
    double inter = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      inter += a[k] * b[k];
      sa += a[k];
      sb += b[k];
    }
    out[i] = (sa + sb == 0.0) ? 1.0 : 2.0 * inter / (sa + sb);
  }
  return out;
}

double mean_dice(const MaskStack& est, const MaskStack& truth) {
  const auto d = dice(est, truth);
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

Vec param_error(const MotionParams& est, const MotionParams& ref) {
  if (est.kind() != ref.kind() || est.n_subscans() != ref.n_subscans())
    throw DimensionError("param_error: parameter shapes differ");
  Vec out(est.vec().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(est.vec()[k] - ref.vec()[k]);
  return out;
}

}  // namespace rmirt
