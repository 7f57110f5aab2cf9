#include "rmirt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmirt {

namespace {

void check_shapes(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                  const MotionParams& p) {
  if (!(x.geom() == cfg.grid)) throw DimensionError("model: image grid mismatch");
  if (!(alpha.geom() == cfg.grid)) throw DimensionError("model: mask grid mismatch");
  if (alpha.n_subscans() != cfg.n_subscans() || p.n_subscans() != cfg.n_subscans())
    throw DimensionError("model: subscan count mismatch");
  if (p.kind() != cfg.model_kind) throw DimensionError("model: motion model mismatch");
}

void check_sino(const ModelConfig& cfg, const Sinogram& b) {
  check_same_size(b.vec().size(), cfg.sino_size(), "model: sinogram");
  if (b.geom().subscan_bounds != cfg.proj_geom.subscan_bounds)
    throw DimensionError("model: sinogram subscan layout mismatch");
}

AffineMap map_for(const MotionParams& p, int i) {
  return build_map(p.block(i), p.kind(), p.center());
}

}  // namespace

ModelConfig::ModelConfig(GridGeom g, ProjGeom geom, MotionModel kind)
    : grid(g), proj_geom(std::move(geom)), proj(make_subscan_projectors(g, proj_geom)),
      model_kind(kind) {}

std::size_t ModelConfig::sino_size() const noexcept {
  std::size_t s = 0;
  for (const auto& w : proj) s += w.range_size();
  return s;
}

double Residual::squared_norm() const {
  double s = 0.0;
  for (const auto& blk : blocks) s += dot(blk, blk);
  return s;
}

Vec deformed_image(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                   const MotionParams& p, int i) {
  const std::size_t n_pix = x.size();
  auto a = alpha.block(i);
  Vec masked(n_pix);
  for (std::size_t k = 0; k < n_pix; ++k) masked[k] = a[k] * x.vec()[k];
  Vec out = warp_apply(map_for(p, i), cfg.grid, masked);
  for (std::size_t k = 0; k < n_pix; ++k) out[k] += (1.0 - a[k]) * x.vec()[k];
  return out;
}

Sinogram forward(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                 const MotionParams& p) {
  check_shapes(cfg, x, alpha, p);
  Sinogram out(cfg.proj_geom);
  for (int i = 0; i < cfg.n_subscans(); ++i)
    cfg.proj[i].project(deformed_image(cfg, x, alpha, p, i), out.block(i));
  return out;
}

Residual residual(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                  const MotionParams& p, const Sinogram& b) {
  check_sino(cfg, b);
  Sinogram fwd = forward(cfg, x, alpha, p);
  Residual r;
  r.blocks.resize(cfg.n_subscans());
  for (int i = 0; i < cfg.n_subscans(); ++i) {
    auto f = fwd.block(i);
    auto bi = b.block(i);
    r.blocks[i].resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r.blocks[i][k] = f[k] - bi[k];
  }
  return r;
}

double objective(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                 const MotionParams& p, const Sinogram& b) {
  return 0.5 * residual(cfg, x, alpha, p, b).squared_norm();
}

Gradients gradients(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
                    const MotionParams& p, const Residual& r, GradientRequest want) {
  check_shapes(cfg, x, alpha, p);
  const int n = cfg.n_subscans();
  const std::size_t n_pix = x.size();
  const int m = p.per_subscan();
  const auto& xv = x.vec();

  Gradients g;
  if (want.x) g.x.assign(n_pix, 0.0);
  if (want.alpha) g.alpha.assign(n_pix * n, 0.0);
  if (want.p) g.p.assign(static_cast<std::size_t>(n) * m, 0.0);

  for (int i = 0; i < n; ++i) {
    const Vec wtr = cfg.proj[i].backproject(r.blocks[i]);
    const AffineMap map = map_for(p, i);
    auto a = alpha.block(i);
    Vec mt;
    if (want.x || want.alpha) mt = warp_adjoint(map, cfg.grid, wtr);

    if (want.x) {
      for (std::size_t k = 0; k < n_pix; ++k)
        g.x[k] += wtr[k] + a[k] * (mt[k] - wtr[k]);
    }
    if (want.alpha) {
      double* gi = g.alpha.data() + i * n_pix;
      for (std::size_t k = 0; k < n_pix; ++k) gi[k] = xv[k] * (mt[k] - wtr[k]);
    }
    if (want.p) {
      Vec masked(n_pix);
      for (std::size_t k = 0; k < n_pix; ++k) masked[k] = a[k] * xv[k];
      const Vec dm = warp_param_grad(p.block(i), p.kind(), p.center(), cfg.grid, masked);
      for (int j = 0; j < m; ++j)
        g.p[i * m + j] =
            dot(std::span<const double>(dm).subspan(j * n_pix, n_pix), wtr);
    }
  }
  return g;
}

Vec grad_x(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
           const MotionParams& p, const Sinogram& b) {
  return gradients(cfg, x, alpha, p, residual(cfg, x, alpha, p, b),
                   {.x = true, .alpha = false, .p = false})
      .x;
}

Vec grad_alpha(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
               const MotionParams& p, const Sinogram& b) {
  return gradients(cfg, x, alpha, p, residual(cfg, x, alpha, p, b),
                   {.x = false, .alpha = true, .p = false})
      .alpha;
}

Vec grad_p(const ModelConfig& cfg, const Image& x, const MaskStack& alpha,
           const MotionParams& p, const Sinogram& b) {
  return gradients(cfg, x, alpha, p, residual(cfg, x, alpha, p, b),
                   {.x = false, .alpha = false, .p = true})
      .p;
}

ConvexityReport restricted_quadratic_probe(const ModelConfig& cfg, const Sinogram& b,
                                           const Image& x, const MaskStack& alpha,
                                           const MotionParams& p, FreeBlock free,
                                           std::span<const double> end_a,
                                           std::span<const double> end_b,
                                           std::span<const double> lambdas) {
  check_same_size(end_a.size(), end_b.size(), "probe: endpoints");
  auto in_box = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double t) { return t >= 0.0 && t <= 1.0; });
  };

  auto eval = [&](std::span<const double> v) {
    switch (free) {
      case FreeBlock::x:
        return objective(cfg, Image(x.geom(), Vec(v.begin(), v.end())), alpha, p, b);
      case FreeBlock::alpha:
        return objective(cfg, x,
                         MaskStack(alpha.geom(), alpha.n_subscans(), Vec(v.begin(), v.end())),
                         p, b);
      case FreeBlock::p:
      default:
        return objective(cfg, x, alpha,
                         MotionParams(p.kind(), p.n_subscans(), Vec(v.begin(), v.end()),
                                      p.center()),
                         b);
    }
  };

  switch (free) {
    case FreeBlock::x:
      check_same_size(end_a.size(), x.size(), "probe: x endpoint");
      if (!in_box(end_a) || !in_box(end_b)) throw DomainError("probe: x endpoint outside [0,1]^N");
      break;
    case FreeBlock::alpha:
      check_same_size(end_a.size(), alpha.vec().size(), "probe: alpha endpoint");
      if (!in_box(end_a) || !in_box(end_b))
        throw DomainError("probe: alpha endpoint outside [0,1]^nN");
      break;
    case FreeBlock::p:
      check_same_size(end_a.size(), p.vec().size(), "probe: p endpoint");
      break;
  }

  ConvexityReport rep;
  const double fa = eval(end_a);
  const double fb = eval(end_b);
  rep.scale = std::max(fa, fb);
  rep.max_violation = -std::numeric_limits<double>::infinity();
  Vec mix(end_a.size());
  for (double lam : lambdas) {
    for (std::size_t k = 0; k < mix.size(); ++k)
      mix[k] = lam * end_a[k] + (1.0 - lam) * end_b[k];
    if (free != FreeBlock::p)
      for (double& v : mix) v = std::clamp(v, 0.0, 1.0);  // roundoff at the box faces
    const double v = eval(mix) - (lam * fa + (1.0 - lam) * fb);
    rep.lambdas.push_back(lam);
    rep.violations.push_back(v);
    rep.max_violation = std::max(rep.max_violation, v);
  }
  return rep;
}

}  // namespace rmirt
