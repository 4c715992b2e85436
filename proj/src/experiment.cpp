#include "stringlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "stringlab/frame.hpp"
#include "stringlab/io.hpp"
#include "stringlab/recovery.hpp"

namespace stringlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_number_list(const std::string& value) {
  std::string clean = value;
  std::replace(clean.begin(), clean.end(), ',', ' ');
  std::istringstream in(clean);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int eps_pow_from = 0, eps_pow_to = 0;
  bool have_pow = false;
  double well_scale = 1.0, well_a = 1.0, well_b = 2.0;
  std::string model_name = "single_well_so3";

  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    auto num = [&] { return std::stod(value); };
    auto integer = [&] { return std::stoi(value); };

    if (key == "model") model_name = value;
    else if (key == "well_scale") well_scale = num();
    else if (key == "well_a") well_a = num();
    else if (key == "well_b") well_b = num();
    else if (key == "alpha") cfg.alpha = num();
    else if (key == "beta") cfg.beta = num();
    else if (key == "k") cfg.k = integer();
    else if (key == "curve_file") cfg.curve_file = value;
    else if (key == "slope") {
      auto v = parse_number_list(value);
      if (v.size() != 3) throw std::invalid_argument("config: slope needs three components");
      cfg.slope = {v[0], v[1], v[2]};
    } else if (key == "length") cfg.length = num();
    else if (key == "eps") cfg.epsilons = parse_number_list(value);
    else if (key == "eps_pow_from") { eps_pow_from = integer(); have_pow = true; }
    else if (key == "eps_pow_to") { eps_pow_to = integer(); have_pow = true; }
    else if (key == "grid_n1") cfg.grid_n1 = integer();
    else if (key == "grid_n2") cfg.grid_n2 = integer();
    else if (key == "grid_n3") cfg.grid_n3 = integer();
    else if (key == "quad_q1") cfg.quad.q1 = integer();
    else if (key == "quad_q2") cfg.quad.q2 = integer();
    else if (key == "quad_q3") cfg.quad.q3 = integer();
    else if (key == "det_tol") cfg.det_tol = num();
    else if (key == "ode_step") cfg.ode_step = num();
    else if (key == "omega_half") cfg.omega_half = num();
    else if (key == "r_min") cfg.r_min = num();
    else if (key == "r_max") cfg.r_max = num();
    else if (key == "r_samples") cfg.r_samples = integer();
    else if (key == "loop_scale") cfg.loop_scale = num();
    else if (key == "moll_scale") cfg.moll_scale = num();
    else if (key == "zero_refine_teeth") cfg.zero_refine_teeth = integer();
    else if (key == "run_detcheck") cfg.run_detcheck = integer() != 0;
    else if (key == "detcheck_n1") cfg.detcheck_n1 = integer();
    else if (key == "detcheck_n2") cfg.detcheck_n2 = integer();
    else if (key == "detcheck_n3") cfg.detcheck_n3 = integer();
    else if (key == "detcheck_step") cfg.detcheck_step = num();
    else if (key == "out_csv") cfg.out_csv = value;
    else if (key == "dump_field") cfg.dump_field = value;
    else if (key == "plot_svg") cfg.plot_svg = value;
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }

  if (model_name == "single_well_so3") cfg.model = StoredDensity::single_well(well_scale);
  else if (model_name == "frobenius") cfg.model = StoredDensity::frobenius();
  else if (model_name == "double_well_radial")
    cfg.model = StoredDensity::double_well(well_a, well_b, well_scale);
  else throw std::invalid_argument("config: unknown model '" + model_name + "'");

  if (have_pow) {
    if (eps_pow_from < eps_pow_to)
      throw std::invalid_argument("config: eps_pow_from must be >= eps_pow_to (powers of two)");
    for (int p = eps_pow_from; p >= eps_pow_to; --p)
      cfg.epsilons.push_back(std::pow(2.0, p));
  }
  std::sort(cfg.epsilons.begin(), cfg.epsilons.end(), std::greater<double>());
  cfg.epsilons.erase(std::unique(cfg.epsilons.begin(), cfg.epsilons.end()), cfg.epsilons.end());

  if (!(cfg.alpha >= 0 && cfg.alpha < 2))
    throw std::invalid_argument("config: alpha must lie in [0, 2)");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

PiecewiseAffineCurve config_curve(const ExperimentConfig& cfg) {
  if (!cfg.curve_file.empty()) return read_curve(cfg.curve_file);
  return PiecewiseAffineCurve::from_slopes({cfg.slope}, {cfg.length});
}

std::vector<double> config_radial_grid(const ExperimentConfig& cfg) {
  std::vector<double> grid = default_radial_grid(cfg.r_min, cfg.r_max, cfg.r_samples);
  // sample the model wells and the target speeds exactly: the envelope is
  // evaluated there by the limit energy and the laminate construction
  if (cfg.model.model == DensityModel::DoubleWellRadial) {
    for (double w : {cfg.model.well_a, cfg.model.well_b})
      if (w > cfg.r_min && w < cfg.r_max) grid.push_back(w);
  }
  PiecewiseAffineCurve target = config_curve(cfg);
  for (std::size_t n = 0; n < target.segments(); ++n) {
    double r = norm(target.slope(n));
    if (r > cfg.r_min && r < cfg.r_max) grid.push_back(r);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             grid.end());
  return grid;
}

Alpha0Schedule alpha0_schedule(const ExperimentConfig& cfg, double eps,
                               double min_segment_after_laminate) {
  Alpha0Schedule s;
  s.j = int(std::ceil(std::pow(eps, -0.25)));
  s.delta = std::pow(eps, 0.25);
  s.eta = s.delta / 4;
  s.loop_delta = std::min(cfg.loop_scale * eps, 0.3 * min_segment_after_laminate);
  s.moll_eta = cfg.moll_scale * eps;  // clamped against the looped layout by the caller
  return s;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool has_reversions(const PiecewiseAffineCurve& c) {
  for (std::size_t n = 1; n < c.segments(); ++n)
    if (anti_parallel(c.slope(n - 1), c.slope(n))) return true;
  return false;
}

}  // namespace

std::vector<ConvergenceRecord> run_alpha0(const ExperimentConfig& cfg) {
  PiecewiseAffineCurve target = config_curve(cfg);
  RadialEnvelope env = radial_profile(cfg.model, config_radial_grid(cfg));
  double area = 4 * cfg.omega_half * cfg.omega_half;
  double limit = limit_energy(target, env, area);

  std::vector<ConvergenceRecord> records;
  for (double eps : cfg.epsilons) {
    auto t0 = std::chrono::steady_clock::now();
    ConvergenceRecord rec;
    rec.eps = eps;
    rec.limit = limit;
    try {
      Alpha0Schedule sched = alpha0_schedule(cfg, eps, target.min_segment_length());
      rec.teeth = sched.j;
      rec.delta = sched.delta;
      rec.eta = sched.eta;

      LaminateCurve lam = laminate_relax(target, env, sched.j);
      PiecewiseAffineCurve pw = lam.refined;
      if (has_reversions(pw)) {
        double loop_delta = std::min(cfg.loop_scale * eps, 0.3 * pw.min_segment_length());
        pw = insert_loops(pw, loop_delta);
      }
      double eta_moll = std::min(sched.moll_eta, 0.45 * pw.min_segment_length());
      auto smooth = std::make_shared<SmoothCurve>(mollify(pw, cfg.k, eta_moll));

      // select argmin cross sections continued along the transported frame,
      // so reversal teeth do not ask the blend for a half turn
      MovingFrame moving = normal_field(smooth);
      std::vector<Mat3x2> sections = aligned_cross_sections(*smooth, moving, cfg.model);
      auto frame = std::make_shared<TailoredFrame>(smooth, std::move(moving),
                                                   std::move(sections), sched.delta, sched.eta);

      BoxGrid grid(target.length(), cfg.grid_n1, cfg.grid_n2, cfg.grid_n3);
      auto tube = std::make_shared<TubeDeformation>(frame, eps, grid);
      PerturbationField pert = inner_perturbation(*tube, grid, 1.0, cfg.ode_step);
      rec.phi_c1 = pert.c1_err;

      auto composed = std::make_shared<ComposedDeformation>(tube, cfg.ode_step);
      EnergyResult e = energy(*composed, 0.0, cfg.model, cfg.quad, cfg.det_tol, cfg.omega_half);
      rec.energy = e.value;
      rec.infinite = e.infinite;
      if (cfg.run_detcheck) {
        BoxGrid coarse(target.length(), cfg.detcheck_n1, cfg.detcheck_n2, cfg.detcheck_n3);
        rec.det_fd = det_check(*composed, coarse, cfg.detcheck_step);
      }
    } catch (const std::exception& e) {
      rec.status = e.what();
      rec.energy = std::nan("");
    }
    rec.seconds = seconds_since(t0);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ConvergenceRecord> run_alpha(const ExperimentConfig& cfg) {
  if (!(cfg.alpha > 0 && cfg.alpha < 2))
    throw std::invalid_argument("run_alpha: alpha must lie in (0, 2)");
  if (cfg.alpha >= 0.5) {
    if (!(cfg.beta < 0.5 - cfg.alpha / 4))
      throw std::invalid_argument("run_alpha: need beta < 1/2 - alpha/4 in this regime");
  } else if (!(cfg.alpha < cfg.beta && cfg.beta < 0.5)) {
    throw std::invalid_argument("run_alpha: need alpha < beta < 1/2 in this regime");
  }

  PiecewiseAffineCurve target = config_curve(cfg);
  RadialEnvelope env = radial_profile(cfg.model, config_radial_grid(cfg));
  auto rstar = zero_level_radius(env);
  if (!rstar)
    throw std::invalid_argument("run_alpha: empty zero level set; the limit admits no finite state");

  PiecewiseAffineCurve refined = zero_set_refine(target, *rstar, cfg.zero_refine_teeth);
  std::vector<Vec3> slopes;
  for (std::size_t n = 0; n < refined.segments(); ++n) slopes.push_back(refined.slope(n));
  std::vector<Mat3x2> sections = optimal_cross_sections(slopes, cfg.model);
  Manifold m = cfg.alpha >= 0.5 ? Manifold::SO3 : Manifold::SL3;
  double area = 4 * cfg.omega_half * cfg.omega_half;
  double limit = limit_energy(refined, env, area);

  std::vector<ConvergenceRecord> records;
  for (double eps : cfg.epsilons) {
    auto t0 = std::chrono::steady_clock::now();
    ConvergenceRecord rec;
    rec.eps = eps;
    rec.limit = limit;
    rec.delta = std::pow(eps, cfg.beta);  // transition window width
    try {
      BoxGrid grid(target.length(), cfg.grid_n1, cfg.grid_n2, cfg.grid_n3);
      auto path = std::make_shared<PathDeformation>(refined, sections, m, cfg.beta, eps, grid);
      PerturbationField pert = inner_perturbation(*path, grid, 1.0 - 2 * cfg.beta, cfg.ode_step);
      rec.phi_c1 = pert.c1_err;

      auto composed = std::make_shared<ComposedDeformation>(path, cfg.ode_step);
      EnergyResult e =
          energy(*composed, cfg.alpha, cfg.model, cfg.quad, cfg.det_tol, cfg.omega_half);
      rec.energy = e.value;
      rec.infinite = e.infinite;
      if (cfg.run_detcheck) {
        BoxGrid coarse(target.length(), cfg.detcheck_n1, cfg.detcheck_n2, cfg.detcheck_n3);
        auto spans = path->window_spans();
        rec.det_fd = det_check(*composed, coarse, cfg.detcheck_step, spans);
      }
    } catch (const std::exception& e) {
      rec.status = e.what();
      rec.energy = std::nan("");
    }
    rec.seconds = seconds_since(t0);
    records.push_back(std::move(rec));
  }
  return records;
}

bool gap_tail_decreasing(const std::vector<ConvergenceRecord>& records, int tail, double tol) {
  std::vector<double> gaps;
  for (const auto& r : records)
    if (r.status == "ok" && !r.infinite && std::isfinite(r.energy))
      gaps.push_back(std::abs(r.energy - r.limit));
  if (int(gaps.size()) < tail) return false;
  for (std::size_t i = gaps.size() - tail; i + 1 < gaps.size(); ++i)
    if (gaps[i + 1] > gaps[i] + tol) return false;
  return true;
}

}  // namespace stringlab
