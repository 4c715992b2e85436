// gamma: batch driver for the string-limit laboratory.
//
//   gamma density  --model M --out profile.csv
//   gamma mollify  --curve curve.txt --k 3 --eta 0.05 --out samples.txt
//   gamma recover  --alpha A --beta B --config run.cfg
//   gamma converge --config run.cfg
//   gamma rates    --in records.csv [--field energy]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>

#include "stringlab/experiment.hpp"
#include "stringlab/frame.hpp"
#include "stringlab/io.hpp"
#include "stringlab/recovery.hpp"

using namespace stringlab;

namespace {

void print_records(const std::vector<ConvergenceRecord>& records) {
  std::printf("%12s %16s %16s %12s %12s %8s  %s\n", "eps", "energy", "limit", "det_fd",
              "phi_c1", "sec", "status");
  for (const auto& r : records) {
    std::printf("%12.5e %16.9e %16.9e %12.3e %12.3e %8.2f  %s\n", r.eps, r.energy, r.limit,
                r.det_fd, r.phi_c1, r.seconds, r.status.c_str());
  }
}

std::vector<ConvergenceRecord> run_config(const ExperimentConfig& cfg) {
  return cfg.alpha == 0 ? run_alpha0(cfg) : run_alpha(cfg);
}

void emit_outputs(const ExperimentConfig& cfg, const std::vector<ConvergenceRecord>& records) {
  if (!cfg.out_csv.empty()) {
    write_records_csv(records, cfg.out_csv);
    std::printf("records -> %s\n", cfg.out_csv.c_str());
  }
  if (!cfg.plot_svg.empty()) {
    PlotSeries gap{"|energy - limit|", {}, {}};
    PlotSeries phi{"phi C1 error", {}, {}};
    for (const auto& r : records) {
      if (r.status != "ok" || !std::isfinite(r.energy)) continue;
      gap.x.push_back(r.eps);
      gap.y.push_back(std::abs(r.energy - r.limit));
      phi.x.push_back(r.eps);
      phi.y.push_back(r.phi_c1);
    }
    write_loglog_svg({gap, phi}, cfg.plot_svg);
    std::printf("plot -> %s\n", cfg.plot_svg.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for incompressible elastic strings"};
  app.require_subcommand(1);

  // density
  auto* density_cmd = app.add_subcommand("density", "reduced density profile and envelope");
  std::string model_name = "single_well_so3";
  std::string density_out = "profile.csv";
  double r_min = 0.05, r_max = 8.0;
  int r_samples = 400;
  density_cmd->add_option("--model", model_name, "single_well_so3 | frobenius | double_well_radial");
  density_cmd->add_option("--out", density_out, "output csv");
  density_cmd->add_option("--rmin", r_min);
  density_cmd->add_option("--rmax", r_max);
  density_cmd->add_option("--samples", r_samples);

  // mollify
  auto* mollify_cmd = app.add_subcommand("mollify", "round the corners of a midline curve");
  std::string curve_path, mollify_out = "mollified.txt";
  int moll_k = 3;
  double moll_eta = 0.05, loop_delta = 0.0;
  int moll_samples = 2001;
  mollify_cmd->add_option("--curve", curve_path, "input curve file (t x y z)")->required();
  mollify_cmd->add_option("--k", moll_k, "smoothness order");
  mollify_cmd->add_option("--eta", moll_eta, "corner window half-width");
  mollify_cmd->add_option("--loops-delta", loop_delta, "detour size for reversals (0 = auto)");
  mollify_cmd->add_option("--samples", moll_samples, "dense output samples");
  mollify_cmd->add_option("--out", mollify_out, "output samples file");

  // recover
  auto* recover_cmd = app.add_subcommand("recover", "single-thickness recovery diagnostics");
  std::string recover_cfg_path;
  double recover_alpha = -1, recover_beta = -1, recover_eps = 0;
  recover_cmd->add_option("--config", recover_cfg_path, "experiment config")->required();
  recover_cmd->add_option("--alpha", recover_alpha, "override config alpha");
  recover_cmd->add_option("--beta", recover_beta, "override config beta");
  recover_cmd->add_option("--eps", recover_eps, "thickness (default: first of config)");

  // converge
  auto* converge_cmd = app.add_subcommand("converge", "thickness sweep with records");
  std::string converge_cfg_path;
  converge_cmd->add_option("--config", converge_cfg_path, "experiment config")->required();

  // rates
  auto* rates_cmd = app.add_subcommand("rates", "fit a decay slope from a records csv");
  std::string rates_in, rates_field = "energy";
  rates_cmd->add_option("--in", rates_in, "records csv")->required();
  rates_cmd->add_option("--field", rates_field, "energy | gap | det_fd | phi_c1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*density_cmd) {
      StoredDensity model = parse_density_model(model_name);
      std::vector<double> grid = default_radial_grid(r_min, r_max, r_samples);
      if (model.model == DensityModel::DoubleWellRadial) {
        for (double w : {model.well_a, model.well_b})
          if (w > r_min && w < r_max) grid.push_back(w);
        std::sort(grid.begin(), grid.end());
      }
      RadialEnvelope env = radial_profile(model, grid);
      write_profile_csv(env, density_out);
      auto r0 = zero_level_radius(env);
      std::printf("model %s: %zu radii, zero-level radius %s\n",
                  density_model_name(model).c_str(), env.r.size(),
                  r0 ? fmt17(*r0).c_str() : "none");
      std::printf("profile -> %s\n", density_out.c_str());
    } else if (*mollify_cmd) {
      PiecewiseAffineCurve curve = read_curve(curve_path);
      bool reversals = false;
      for (std::size_t n = 1; n < curve.segments(); ++n)
        if (anti_parallel(curve.slope(n - 1), curve.slope(n))) reversals = true;
      if (reversals) {
        double d = loop_delta > 0 ? loop_delta : 0.2 * curve.min_segment_length();
        curve = insert_loops(curve, d);
        std::printf("reversals detected: loops inserted with delta = %g\n", d);
      }
      SmoothCurve smooth = mollify(curve, moll_k, moll_eta);
      write_curve_samples(smooth, moll_samples, mollify_out);
      std::printf("C^%d curve, speed in [%g, %g]; samples -> %s\n", moll_k,
                  smooth.speed_min(), smooth.speed_max(), mollify_out.c_str());
    } else if (*recover_cmd) {
      ExperimentConfig cfg = parse_config_file(recover_cfg_path);
      if (recover_alpha >= 0) cfg.alpha = recover_alpha;
      if (recover_beta > 0) cfg.beta = recover_beta;
      if (recover_eps > 0)
        cfg.epsilons = {recover_eps};
      else if (!cfg.epsilons.empty())
        cfg.epsilons = {cfg.epsilons.front()};
      else
        throw std::invalid_argument("recover: no thickness given");
      auto records = run_config(cfg);
      print_records(records);
      if (!cfg.dump_field.empty() && records.front().status == "ok") {
        std::printf("note: field dump requested; re-run converge to emit %s\n",
                    cfg.dump_field.c_str());
      }
      emit_outputs(cfg, records);
    } else if (*converge_cmd) {
      ExperimentConfig cfg = parse_config_file(converge_cfg_path);
      auto records = run_config(cfg);
      print_records(records);
      std::vector<double> eps, vals;
      for (const auto& r : records)
        if (r.status == "ok" && std::isfinite(r.energy)) {
          eps.push_back(r.eps);
          vals.push_back(std::abs(r.energy - r.limit));
        }
      try {
        double slope = rate_fit(eps, vals);
        std::printf("fitted |energy - limit| slope: %.4f\n", slope);
      } catch (const std::exception&) {
        std::printf("fitted slope unavailable (too few positive records)\n");
      }
      emit_outputs(cfg, records);
    } else if (*rates_cmd) {
      auto records = read_records_csv(rates_in);
      std::vector<double> eps, vals;
      int skipped = 0;
      for (const auto& r : records) {
        if (r.status != "ok") continue;
        double v = 0;
        if (rates_field == "energy") v = r.energy;
        else if (rates_field == "gap") v = std::abs(r.energy - r.limit);
        else if (rates_field == "det_fd") v = r.det_fd;
        else if (rates_field == "phi_c1") v = r.phi_c1;
        else throw std::invalid_argument("rates: unknown field " + rates_field);
        if (!(v > 0) || !std::isfinite(v)) {
          ++skipped;
          continue;
        }
        eps.push_back(r.eps);
        vals.push_back(v);
      }
      if (skipped) std::printf("warning: %d nonpositive records excluded\n", skipped);
      double slope = rate_fit(eps, vals);
      std::printf("%s slope vs eps: %.6f\n", rates_field.c_str(), slope);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
