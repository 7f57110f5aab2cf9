#include "rmirt/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "rmirt/io.hpp"
#include "rmirt/metrics.hpp"

namespace rmirt {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Image support_of(const Image& x) {
  Image s(x.geom());
  for (std::size_t k = 0; k < x.size(); ++k) s.data()[k] = x.vec()[k] > 0.0 ? 1.0 : 0.0;
  return s;
}

Image first_block(const MaskStack& m) {
  auto b = m.block(0);
  return Image(m.geom(), Vec(b.begin(), b.end()));
}

}  // namespace

const VariantOutcome* ExperimentOutcome::find(Variant v) const {
  for (const auto& o : variants)
    if (o.variant == v) return &o;
  return nullptr;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov,
                                 bool write_outputs) {
  const ProjGeom geom = cfg.proj_geom();
  const MotionTimeline timeline = cfg.timeline();
  const GridGeom& grid = cfg.phantom.geom;
  const int n = geom.n_subscans();

  ExperimentOutcome out;
  out.truth = simulate_experiment(cfg.phantom, timeline, geom, cfg.noise_fraction,
                                  ov.seed.value_or(cfg.noise_seed));
  out.true_center = timeline.center;
  const Sinogram& b = out.truth.noisy;
  const ModelConfig model(grid, geom, cfg.motion_kind);
  const GroundTruthRef ref{&out.truth.x_true, &out.truth.mask_true};

  out.alpha_init = MaskStack::replicate(
      grow_region_rows(first_block(out.truth.mask_true), support_of(out.truth.x_true),
                       cfg.initial_mask_growth),
      n);
  const GridPoint init_center =
      update_center(out.alpha_init, {grid.center_row(), grid.center_col()});

  SolverOptions static_opts = cfg.solver;
  static_opts.freeze_alpha = true;
  static_opts.freeze_p = true;
  static_opts.update_center = false;

  auto static_solve = [&](int iters) {
    SolverOptions o = static_opts;
    o.n_iter = iters;
    return run(model, b,
               {Image(grid), MaskStack(grid, n, 0.0),
                MotionParams(cfg.motion_kind, n, init_center)},
               o, ref);
  };

  // x0 is zero, or an uncompensated reconstruction when init_iters > 0.
  std::optional<SolverResult> init_run;
  if (cfg.init_iters > 0) {
    init_run = static_solve(cfg.init_iters);
    out.x_init = init_run->x;
  } else {
    out.x_init = Image(grid);
  }

  for (Variant v : cfg.variants) {
    VariantOutcome vo;
    vo.variant = v;
    switch (v) {
      case Variant::none:
        vo.result = init_run && cfg.init_iters == cfg.solver.n_iter
                        ? *init_run
                        : static_solve(cfg.solver.n_iter);
        break;
      case Variant::global: {
        SolverOptions o = cfg.solver;
        o.freeze_alpha = true;
        o.update_center = false;
        vo.result = run(model, b,
                        {out.x_init, MaskStack(grid, n, 1.0),
                         MotionParams(cfg.motion_kind, n, init_center)},
                        o, ref);
        break;
      }
      case Variant::rmirt:
        vo.result = run(model, b,
                        {out.x_init, out.alpha_init,
                         MotionParams(cfg.motion_kind, n, init_center)},
                        cfg.solver, ref);
        break;
    }
    vo.final_mse = mse(vo.result.x, out.truth.x_true);
    vo.dice = dice(vo.result.alpha, out.truth.mask_true);
    MotionParams ref_p = out.truth.p_true_subscan;
    ref_p.set_center(vo.result.p.center());
    vo.param_abs_error = param_error(vo.result.p, ref_p);
    out.variants.push_back(std::move(vo));
  }

  if (!write_outputs) return out;

  namespace fs = std::filesystem;
  const fs::path dir = ov.output_dir.value_or(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const int w = grid.width;
  const int h = grid.height;
  auto save_image = [&](const std::string& stem, std::span<const double> data, int slices) {
    write_raw_grid((dir / stem).string(), data, w, h, slices);
    write_pgm((dir / (stem + ".pgm")).string(), data, w, h * slices);
    out.files.push_back(stem + ".raw");
    out.files.push_back(stem + ".hdr");
    out.files.push_back(stem + ".pgm");
  };

  save_image("truth_recon", out.truth.x_true.data(), 1);
  save_image("truth_mask", out.truth.mask_true.data(), n);

  const auto names = param_names(cfg.motion_kind);
  const int m = param_count(cfg.motion_kind);
  for (const auto& vo : out.variants) {
    const std::string tag = to_string(vo.variant);
    save_image(tag + "_recon", vo.result.x.data(), 1);
    save_image(tag + "_mask", vo.result.alpha.data(), n);

    std::ostringstream csv;
    csv << "subscan,param,estimate,reference,abs_error\n";
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        csv << i << "," << names[j] << "," << num(vo.result.p.block(i)[j]) << ","
            << num(out.truth.p_true_subscan.block(i)[j]) << ","
            << num(vo.param_abs_error[i * m + j]) << "\n";
    write_text((dir / (tag + "_params.csv")).string(), csv.str());
    out.files.push_back(tag + "_params.csv");
  }

  write_text((dir / "metrics.csv").string(), metrics_table(out));
  out.files.push_back("metrics.csv");

  std::ostringstream summary;
  summary << "true_center_row " << num(out.true_center.row) << "\n";
  for (const auto& vo : out.variants) {
    double dsum = 0.0;
    for (double d : vo.dice) dsum += d;
    summary << "variant " << to_string(vo.variant) << " final_mse " << num(vo.final_mse)
            << " dice_mean " << num(dsum / vo.dice.size()) << " center_row "
            << num(vo.result.p.center().row) << "\n";
  }
  out.files.push_back("summary.txt");
  summary << "files";
  for (const auto& f : out.files) summary << " " << f;
  summary << "\n";
  write_text((dir / "summary.txt").string(), summary.str());
  return out;
}

std::string metrics_table(const ExperimentOutcome& out) {
  std::ostringstream csv;
  csv << "variant,iteration,objective,mse,dice_mean,step_x,step_p,step_alpha,center_row\n";
  for (const auto& vo : out.variants) {
    const std::string tag = to_string(vo.variant);
    auto row = [&](const IterationRecord& r) {
      csv << tag << "," << r.iteration << "," << num(r.objective) << "," << num(r.mse) << ","
          << num(r.dice_mean) << "," << num(r.step_x) << "," << num(r.step_p) << ","
          << num(r.step_alpha) << "," << num(r.center.row) << "\n";
    };
    row(vo.result.trace.initial);
    for (const auto& r : vo.result.trace.iterations) row(r);
  }
  return csv.str();
}

}  // namespace rmirt
