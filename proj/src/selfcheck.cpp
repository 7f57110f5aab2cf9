#include "rmirt/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rmirt/optimizer.hpp"
#include "rmirt/sim.hpp"

namespace rmirt {

namespace {

Vec random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (double& t : v) t = u(rng);
  return v;
}

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

double evaluate(const TinyInstance& t, FreeBlock block, const Vec& v) {
  switch (block) {
    case FreeBlock::x:
      return objective(t.cfg, Image(t.x.geom(), v), t.alpha, t.p, t.b);
    case FreeBlock::alpha:
      return objective(t.cfg, t.x, MaskStack(t.alpha.geom(), t.alpha.n_subscans(), v), t.p,
                       t.b);
    case FreeBlock::p:
    default:
      return objective(t.cfg, t.x, t.alpha, MotionParams(t.p.kind(), t.p.n_subscans(), v,
                                                         t.p.center()),
                       t.b);
  }
}

CheckResult projector_adjoint_check(bool corrupt) {
  std::mt19937_64 rng(101);
  const GridGeom grid(16, 16);
  const SubscanProjector w(grid, {0.0, 0.4, 0.9, 1.3, 2.2, 2.9}, 24, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_vec(rng, grid.size(), -1.0, 1.0);
    const Vec y = random_vec(rng, w.range_size(), -1.0, 1.0);
    Vec wty = w.backproject(y);
    if (corrupt)
      for (double& v : wty) v *= 1.0 + 1e-6;
    worst = std::max(worst, rel_gap(dot(w.project(x), y), dot(x, wty)));
  }
  return {"projector adjoint", worst <= 1e-12, worst, 1e-12};
}

CheckResult warp_adjoint_check(MotionModel kind) {
  std::mt19937_64 rng(kind == MotionModel::scale2 ? 202 : 203);
  const GridGeom grid(16, 16);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vec p = identity_params(kind);
    p[0] += 0.3 * u(rng);
    p[1] += 0.3 * u(rng);
    if (kind == MotionModel::scale_rot_trans) {
      p[2] = 0.5 * u(rng);
      p[3] = 2.0 * u(rng);
      p[4] = 2.0 * u(rng);
    }
    const AffineMap m = build_map(p, kind, {7.5 + u(rng), 7.5 + u(rng)});
    const Vec x = random_vec(rng, grid.size(), -1.0, 1.0);
    const Vec y = random_vec(rng, grid.size(), -1.0, 1.0);
    worst = std::max(worst, rel_gap(dot(warp_apply(m, grid, x), y),
                                    dot(x, warp_adjoint(m, grid, y))));
  }
  return {"warp adjoint (" + to_string(kind) + ")", worst <= 1e-12, worst, 1e-12};
}

CheckResult convexity_check(FreeBlock block) {
  double worst = -1.0;
  for (int trial = 0; trial < 10; ++trial) {
    const TinyInstance t = make_tiny_instance(500 + trial);
    std::mt19937_64 rng(900 + trial);
    const std::size_t n = block == FreeBlock::x ? t.x.size() : t.alpha.vec().size();
    const Vec a = random_vec(rng, n, 0.0, 1.0);
    const Vec b = random_vec(rng, n, 0.0, 1.0);
    const Vec lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto rep = restricted_quadratic_probe(t.cfg, t.b, t.x, t.alpha, t.p, block, a, b,
                                                lambdas);
    worst = std::max(worst, rep.max_violation / std::max(rep.scale, 1e-300));
  }
  return {std::string("biconvexity probe (") + (block == FreeBlock::x ? "x" : "alpha") + ")",
          worst <= 1e-9, worst, 1e-9};
}

std::vector<CheckResult> stationarity_checks() {
  PhantomSpec spec;
  spec.geom = GridGeom(32, 32);
  spec.static_band_rows = 10;
  spec.texture_seed = 3;
  const Phantom ph = make_phantom(spec);
  const ProjGeom geom = ProjGeom::uniform(30, 3.14159265358979323846, 48, 1.0, 3);
  MotionTimeline tl;
  tl.kind = MotionModel::scale2;
  tl.start = {1.0, 1.0};
  tl.end = {0.95, 1.15};
  tl.center = {static_cast<double>(static_boundary_row(spec) - 1), spec.geom.center_col()};
  tl.schedule = Schedule::piecewise_constant;

  const Sinogram b = simulate_dynamic_sinogram(ph.image, ph.region, tl, geom);
  const ModelConfig cfg(spec.geom, geom, tl.kind);
  const MaskStack alpha = MaskStack::replicate(ph.region, geom.n_subscans());
  const MotionParams p = subscan_representative_params(tl, geom);
  const Residual r = residual(cfg, ph.image, alpha, p, b);
  const Gradients g = gradients(cfg, ph.image, alpha, p, r);
  const double bn = norm2(b.vec());
  const double f_rel = 0.5 * r.squared_norm() / (bn * bn);
  const double g_rel = std::max({norm2(g.x), norm2(g.alpha), norm2(g.p)}) / bn;
  return {{"stationarity objective", f_rel <= 1e-18, f_rel, 1e-18},
          {"stationarity gradients", g_rel <= 1e-8, g_rel, 1e-8}};
}

}  // namespace

TinyInstance make_tiny_instance(std::uint64_t seed, MotionModel kind) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridGeom grid(8, 8);
  ProjGeom geom = ProjGeom::uniform(8, 3.14159265358979323846, 12, 1.0, 2);
  ModelConfig cfg(grid, geom, kind);

  Image x(grid, random_vec(rng, grid.size(), 0.1, 0.9));
  MaskStack alpha(grid, 2, random_vec(rng, 2 * grid.size(), 0.1, 0.9));
  Vec pv;
  for (int i = 0; i < 2; ++i) {
    Vec pi = identity_params(kind);
    pi[0] += 0.1 * u(rng);
    pi[1] += 0.1 * u(rng);
    if (kind == MotionModel::scale_rot_trans) {
      pi[2] = 0.2 * u(rng);
      pi[3] = 0.5 * u(rng);
      pi[4] = 0.5 * u(rng);
    }
    pv.insert(pv.end(), pi.begin(), pi.end());
  }
  MotionParams p(kind, 2, std::move(pv), {4.2, 3.3});

  const Image other(grid, random_vec(rng, grid.size(), 0.0, 1.0));
  Sinogram b = project_all(grid, geom, other);
  for (double& v : b.data()) v += 0.1 * u(rng);
  return {std::move(cfg), std::move(x), std::move(alpha), std::move(p), std::move(b)};
}

double gradient_fd_error(const TinyInstance& t, FreeBlock block, double h) {
  const Residual r = residual(t.cfg, t.x, t.alpha, t.p, t.b);
  const GradientRequest want{block == FreeBlock::x, block == FreeBlock::alpha,
                             block == FreeBlock::p};
  const Gradients g = gradients(t.cfg, t.x, t.alpha, t.p, r, want);
  const Vec& analytic = block == FreeBlock::x ? g.x : block == FreeBlock::alpha ? g.alpha : g.p;
  const Vec base = block == FreeBlock::x       ? t.x.vec()
                   : block == FreeBlock::alpha ? t.alpha.vec()
                                               : t.p.vec();
  double err = 0.0, ref = 0.0;
  Vec v = base;
  for (std::size_t k = 0; k < base.size(); ++k) {
    v[k] = base[k] + h;
    const double fp = evaluate(t, block, v);
    v[k] = base[k] - h;
    const double fm = evaluate(t, block, v);
    v[k] = base[k];
    const double fd = (fp - fm) / (2.0 * h);
    err += (analytic[k] - fd) * (analytic[k] - fd);
    ref += fd * fd;
  }
  return std::sqrt(err / std::max(ref, 1e-300));
}

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opts) {
  std::vector<CheckResult> out;
  out.push_back(projector_adjoint_check(opts.corrupt_adjoint));
  out.push_back(warp_adjoint_check(MotionModel::scale2));
  out.push_back(warp_adjoint_check(MotionModel::scale_rot_trans));

  const TinyInstance t = make_tiny_instance(42);
  const double ex = gradient_fd_error(t, FreeBlock::x, 1e-4);
  const double ea = gradient_fd_error(t, FreeBlock::alpha, 1e-4);
  const double ep = gradient_fd_error(t, FreeBlock::p, 1e-6);
  const TinyInstance tr = make_tiny_instance(43, MotionModel::scale_rot_trans);
  const double epr = gradient_fd_error(tr, FreeBlock::p, 1e-6);
  out.push_back({"gradient x vs finite differences", ex <= 1e-5, ex, 1e-5});
  out.push_back({"gradient alpha vs finite differences", ea <= 1e-5, ea, 1e-5});
  out.push_back({"gradient p vs finite differences (scale2)", ep <= 1e-4, ep, 1e-4});
  out.push_back({"gradient p vs finite differences (scale_rot_trans)", epr <= 1e-4, epr, 1e-4});

  out.push_back(convexity_check(FreeBlock::x));
  out.push_back(convexity_check(FreeBlock::alpha));
  for (auto& c : stationarity_checks()) out.push_back(std::move(c));
  return out;
}

}  // namespace rmirt
