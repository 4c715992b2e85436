// Experiment configuration, the deterministic parameter schedules that drive
// the recovery pipelines across a thickness sweep, and convergence records.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stringlab/curve.hpp"
#include "stringlab/density.hpp"
#include "stringlab/energy.hpp"

namespace stringlab {

struct ExperimentConfig {
  StoredDensity model = StoredDensity::single_well();

  double alpha = 0;
  double beta = 0.2;
  int k = 3;  // smoothness order of the corner rounding

  // midline target: either a curve file or a constant slope over [0, L]
  std::string curve_file;
  Vec3 slope{1, 0, 0};
  double length = 1;

  std::vector<double> epsilons;  // sorted decreasing by the parser

  int grid_n1 = 129, grid_n2 = 17, grid_n3 = 33;
  Quadrature quad;
  double det_tol = 1e-6;
  double ode_step = 1e-3;
  double omega_half = 0.5;

  double r_min = 0.05, r_max = 8;
  int r_samples = 400;

  // schedule scales for window widths that the thickness drives directly
  double loop_scale = 600;  // detour size   ~ loop_scale * eps
  double moll_scale = 128;  // corner window ~ moll_scale * eps

  int zero_refine_teeth = 8;  // sawtooth refinement onto the zero-level sphere

  bool run_detcheck = true;
  int detcheck_n1 = 33, detcheck_n2 = 5, detcheck_n3 = 9;
  double detcheck_step = 1e-4;

  std::string out_csv, dump_field, plot_svg;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct ConvergenceRecord {
  double eps = 0;
  double energy = 0;
  bool infinite = false;
  double limit = 0;
  double det_fd = 0;   // finite-difference incompressibility error
  double phi_c1 = 0;   // ||phi - x3||_C1 of the inner perturbation
  double seconds = 0;
  int teeth = 0;       // laminate refinement j
  double delta = 0, eta = 0;
  std::string status = "ok";
};

// Thickness schedule of the string-regime pipeline: j = ceil(eps^{-1/4}),
// delta = eps^{1/4}, eta = delta / 4 for the frame windows.
struct Alpha0Schedule {
  int j;
  double delta, eta;
  double loop_delta, moll_eta;
};
Alpha0Schedule alpha0_schedule(const ExperimentConfig& cfg, double eps,
                               double min_segment_after_laminate);

// Full pipelines; each thickness is recorded independently and failures
// abort only their own record.
std::vector<ConvergenceRecord> run_alpha0(const ExperimentConfig& cfg);
std::vector<ConvergenceRecord> run_alpha(const ExperimentConfig& cfg);

// load the target curve of a config (file or constant slope)
PiecewiseAffineCurve config_curve(const ExperimentConfig& cfg);
// profile grid for the configured model, with well radii sampled exactly
std::vector<double> config_radial_grid(const ExperimentConfig& cfg);

// |gap to limit| non-increasing over the last `tail` finished records, up to
// an absolute tolerance
bool gap_tail_decreasing(const std::vector<ConvergenceRecord>& records, int tail = 3,
                         double tol = 1e-6);

}  // namespace stringlab
