#include "rmirt/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rmirt/metrics.hpp"

namespace rmirt {

void SolverOptions::validate() const {
  if (n_iter < 1) throw DomainError("solver: n_iter must be >= 1");
  auto check = [](const StepClamps& c, const char* name) {
    if (c.min < 0.0 || c.max < 0.0 || (c.min > 0.0 && c.max > 0.0 && c.min > c.max))
      throw DomainError(std::string("solver: invalid ") + name + " step clamps");
  };
  check(x_steps, "x");
  check(p_steps, "p");
  if (!(bb_max_factor >= 1.0)) throw DomainError("solver: bb_max_factor must be >= 1");
  if (alpha_step_scale < 0.0) throw DomainError("solver: alpha_step_scale must be positive");
  if (!(alpha_first_step > 0.0)) throw DomainError("solver: alpha_first_step must be positive");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw DomainError("solver: threshold must lie in (0,1)");
}

double bb_stepsize(std::span<const double> dv, std::span<const double> dg,
                   StepClamps clamps) {
  const double num = dot(dv, dg);
  const double den = dot(dg, dg);
  if (!(den > 0.0)) return clamps.min;
  const double q = num / den;
  if (!std::isfinite(q)) return clamps.min;
  return std::clamp(q, clamps.min, clamps.max);
}

void project_box(std::span<double> v) {
  for (double& t : v) t = std::clamp(t, 0.0, 1.0);
}

Image project_box(Image x) {
  project_box(x.data());
  return x;
}

MaskStack project_binary(const MaskStack& alpha, double threshold) {
  Vec out(alpha.vec().size());
  std::transform(alpha.vec().begin(), alpha.vec().end(), out.begin(),
                 [threshold](double a) { return a >= threshold ? 1.0 : 0.0; });
  return MaskStack(alpha.geom(), alpha.n_subscans(), std::move(out));
}

GridPoint update_center(const MaskStack& binary_alpha, GridPoint previous) {
  const auto& g = binary_alpha.geom();
  int last_row = -1;
  for (int i = 0; i < binary_alpha.n_subscans(); ++i) {
    auto blk = binary_alpha.block(i);
    for (int r = g.height - 1; r > last_row; --r) {
      const auto row = blk.subspan(static_cast<std::size_t>(r) * g.width, g.width);
      if (std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; })) {
        last_row = r;
        break;
      }
    }
  }
  if (last_row < 0) return previous;
  return {static_cast<double>(last_row), g.center_col()};
}

double estimate_system_norm(const ModelConfig& cfg, int iterations) {
  const std::size_t n_pix = cfg.grid.size();
  Vec v(n_pix, 1.0 / std::sqrt(static_cast<double>(n_pix)));
  Vec w(n_pix);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (const auto& proj : cfg.proj) {
      const Vec bp = proj.backproject(proj.project(v));
      for (std::size_t k = 0; k < n_pix; ++k) w[k] += bp[k];
    }
    lambda = norm2(w);
    if (!(lambda > 0.0)) return 0.0;
    for (std::size_t k = 0; k < n_pix; ++k) v[k] = w[k] / lambda;
  }
  return lambda;
}

double estimate_param_curvature(const ModelConfig& cfg, const Image& x,
                                const MaskStack& alpha, const MotionParams& p) {
  const std::size_t n_pix = x.size();
  const int m = p.per_subscan();
  double worst = 0.0;
  for (int i = 0; i < cfg.n_subscans(); ++i) {
    auto a = alpha.block(i);
    Vec masked(n_pix);
    for (std::size_t k = 0; k < n_pix; ++k) masked[k] = a[k] * x.vec()[k];
    const Vec dm = warp_param_grad(p.block(i), p.kind(), p.center(), cfg.grid, masked);
    double trace = 0.0;
    for (int j = 0; j < m; ++j) {
      const Vec col = cfg.proj[i].project(std::span<const double>(dm).subspan(j * n_pix, n_pix));
      trace += dot(col, col);
    }
    worst = std::max(worst, trace);
  }
  return worst;
}

namespace {

StepClamps resolve(StepClamps c, double lipschitz, double factor) {
  if (c.min == 0.0) c.min = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  if (c.max == 0.0) c.max = factor * c.min;
  c.max = std::max(c.max, c.min);
  return c;
}

void tie_blocks(std::span<double> data, int n, std::size_t n_pix) {
  for (std::size_t k = 0; k < n_pix; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += data[i * n_pix + k];
    for (int i = 0; i < n; ++i) data[i * n_pix + k] = s;
  }
}

void check_finite(std::span<const double> v, const char* block, int iteration) {
  if (!all_finite(v)) throw DivergenceError(block, iteration);
}

Vec diff(std::span<const double> a, std::span<const double> b) {
  Vec d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

}  // namespace

SolverResult run(const ModelConfig& cfg, const Sinogram& b, SolverState init,
                 const SolverOptions& opts, GroundTruthRef truth) {
  opts.validate();
  if (!init.x.in_unit_box()) throw DomainError("solver: initial x outside [0,1]^N");
  auto& x = init.x;
  auto& alpha = init.alpha;
  auto& p = init.p;
  const int n = cfg.n_subscans();
  const std::size_t n_pix = cfg.grid.size();

  if (opts.tie_masks) {
    // Start from the subscan average so the blocks agree.
    auto a = alpha.data();
    for (std::size_t k = 0; k < n_pix; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += a[i * n_pix + k];
      for (int i = 0; i < n; ++i) a[i * n_pix + k] = s / n;
    }
  }

  SolverResult out;
  if (!opts.freeze_x)
    out.x_steps = resolve(opts.x_steps, estimate_system_norm(cfg, opts.power_iterations),
                          opts.bb_max_factor);
  // The parameter curvature vanishes while alpha * x is zero (e.g. x = 0), so
  // automatic p clamps are fixed at the first iterate where it is positive.
  bool p_ready = opts.freeze_p || opts.p_steps.min > 0.0;
  if (p_ready && !opts.freeze_p) out.p_steps = resolve(opts.p_steps, 0.0, opts.bb_max_factor);

  auto record = [&](int it, double f) {
    IterationRecord rec;
    rec.iteration = it;
    rec.objective = f;
    if (truth.x) rec.mse = mse(x, *truth.x);
    if (truth.mask) rec.dice_mean = mean_dice(project_binary(alpha, opts.threshold), *truth.mask);
    rec.center = p.center();
    return rec;
  };

  Residual r = residual(cfg, x, alpha, p, b);
  double f = 0.5 * r.squared_norm();
  if (!std::isfinite(f)) throw DivergenceError("objective", 0);
  out.trace.initial = record(0, f);

  Vec prev_x, prev_gx, prev_p, prev_gp;
  double alpha_scale = opts.alpha_step_scale;
  const GradientRequest want{!opts.freeze_x, !opts.freeze_alpha, !opts.freeze_p};

  for (int i = 0; i < opts.n_iter; ++i) {
    Gradients g = gradients(cfg, x, alpha, p, r, want);
    IterationRecord rec;
    rec.grad_norm_x = want.x ? norm2(g.x) : 0.0;
    rec.grad_norm_alpha = want.alpha ? norm2(g.alpha) : 0.0;
    rec.grad_norm_p = want.p ? norm2(g.p) : 0.0;

    if (want.x) {
      check_finite(g.x, "x gradient", i);
      const double step =
          prev_x.empty() ? out.x_steps.min
                         : bb_stepsize(diff(x.vec(), prev_x), diff(g.x, prev_gx), out.x_steps);
      prev_x = x.vec();
      prev_gx = g.x;
      auto xd = x.data();
      for (std::size_t k = 0; k < n_pix; ++k) xd[k] -= step * g.x[k];
      project_box(xd);
      rec.step_x = step;
    }

    if (want.p && !p_ready) {
      const double lp = estimate_param_curvature(cfg, x, alpha, p);
      if (lp > 0.0) {
        out.p_steps = resolve(opts.p_steps, lp, opts.bb_max_factor);
        p_ready = true;
      }
    }
    if (want.p && p_ready) {
      if (opts.gauss_seidel && want.x)
        g.p = gradients(cfg, x, alpha, p, residual(cfg, x, alpha, p, b),
                        {.x = false, .alpha = false, .p = true})
                  .p;
      check_finite(g.p, "p gradient", i);
      const double step =
          prev_p.empty() ? out.p_steps.min
                         : bb_stepsize(diff(p.vec(), prev_p), diff(g.p, prev_gp), out.p_steps);
      prev_p = p.vec();
      prev_gp = g.p;
      auto pd = p.data();
      for (std::size_t k = 0; k < pd.size(); ++k) pd[k] -= step * g.p[k];
      try {
        p.validate();
      } catch (const DomainError&) {
        throw DivergenceError("motion parameters", i);
      }
      rec.step_p = step;
    }

    if (want.alpha) {
      if (opts.gauss_seidel && (want.x || want.p))
        g.alpha = gradients(cfg, x, alpha, p, residual(cfg, x, alpha, p, b),
                            {.x = false, .alpha = true, .p = false})
                      .alpha;
      check_finite(g.alpha, "alpha gradient", i);
      if (opts.tie_masks) tie_blocks(g.alpha, n, n_pix);
      if (alpha_scale == 0.0) {
        double gmax = 0.0;
        for (double v : g.alpha) gmax = std::max(gmax, std::abs(v));
        if (gmax > 0.0) alpha_scale = opts.alpha_first_step * (i + 1) / gmax;
      }
      const double step = alpha_scale / (i + 1);
      auto ad = alpha.data();
      for (std::size_t k = 0; k < ad.size(); ++k) ad[k] -= step * g.alpha[k];
      project_box(ad);
      rec.step_alpha = step;

      if (opts.update_center)
        p.set_center(update_center(project_binary(alpha, opts.threshold), p.center()));
    }

    r = residual(cfg, x, alpha, p, b);
    f = 0.5 * r.squared_norm();
    if (!std::isfinite(f)) throw DivergenceError("objective", i);

    const IterationRecord base = record(i + 1, f);
    rec.iteration = base.iteration;
    rec.objective = base.objective;
    rec.mse = base.mse;
    rec.dice_mean = base.dice_mean;
    rec.center = base.center;
    out.trace.iterations.push_back(rec);
  }

  out.alpha = project_binary(alpha, opts.threshold);
  out.alpha_relaxed = alpha;
  out.x = std::move(x);
  out.p = std::move(p);
  out.alpha_step_scale = alpha_scale;
  return out;
}

}  // namespace rmirt
