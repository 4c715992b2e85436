// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its measured quantities and wall time.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include "oracles.hpp"
#include "stringlab/energy.hpp"
#include "stringlab/experiment.hpp"
#include "stringlab/frame.hpp"
#include "stringlab/recovery.hpp"

using namespace stringlab;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void report(int criterion, const char* name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[ACCEPT] %d %-28s %s  (%.1fs; %s)\n", criterion, name,
              pass ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
}

std::shared_ptr<const TailoredFrame> two_segment_frame() {
  Vec3 diag = normalized(Vec3{1, 1, 0});
  auto pw = PiecewiseAffineCurve::from_slopes({e1, diag}, {1, 1});
  auto curve = std::make_shared<const SmoothCurve>(mollify(pw, 3, 0.1));
  std::vector<Vec3> slopes;
  for (const auto& p : curve->pieces())
    if (p.affine) slopes.push_back(p.slope);
  auto sections = optimal_cross_sections(slopes, StoredDensity::single_well());
  return std::make_shared<const TailoredFrame>(tailored_frame(curve, sections, 0.1, 0.025));
}

}  // namespace

TEST_CASE("criterion 1: closed-form reduced density of the quadratic model") {
  Stopwatch sw;
  StoredDensity fr = StoredDensity::frobenius();
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    double r = 0.2 * std::pow(25.0, i / 49.0);  // log-spaced in [0.2, 5]
    std::vector<double> h = halton(i, 2);
    double az = 2 * M_PI * h[0], pol = std::acos(2 * h[1] - 1);
    Vec3 dir{std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
    ReducedSample s = reduce_density(fr, r * dir);
    double expect = r * r + 2 / r;
    worst = std::max(worst, std::abs(s.value - expect) / expect);
  }
  bool pass = worst <= 1e-6 && sw.seconds() <= 60;
  CHECK(worst <= 1e-6);
  CHECK(sw.seconds() <= 60);
  report(1, "reduced density closed form", pass, sw.seconds(),
         "max rel err " + fmt17(worst));
}

TEST_CASE("criterion 2: zero level set of the single-well envelope") {
  Stopwatch sw;
  StoredDensity swell = StoredDensity::single_well();
  RadialEnvelope env = radial_profile(swell, default_radial_grid(0.05, 8.0, 400));
  double worst_low = 0, worst_high = 1e300;
  for (std::size_t i = 0; i < env.r.size(); ++i) {
    if (env.r[i] <= 1.0) worst_low = std::max(worst_low, env.fc[i]);
    if (env.r[i] >= 1.1) worst_high = std::min(worst_high, env.fc[i]);
  }
  bool pass = worst_low <= 1e-8 && worst_high >= 1e-4 && sw.seconds() <= 10;
  CHECK(worst_low <= 1e-8);
  CHECK(worst_high >= 1e-4);
  CHECK(sw.seconds() <= 10);
  report(2, "single-well zero level set", pass, sw.seconds(),
         "max fc on ball " + fmt17(worst_low) + ", min fc beyond 1.1 " + fmt17(worst_high));
}

TEST_CASE("criterion 3: bernstein basis identities") {
  Stopwatch sw;
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int p = 1 + int(oracles::uniform(0, 12));
    int q = int(oracles::uniform(0, p + 1));
    double t = oracles::uniform(0.0, 1.0);

    // partition of unity
    double sum = 0;
    for (int m = 0; m <= p; ++m) sum += bernstein(m, p, t);
    worst = std::max(worst, std::abs(sum - 1.0));

    // endpoint values
    worst = std::max(worst, std::abs(bernstein(0, p, 0.0) - 1.0));
    worst = std::max(worst, std::abs(bernstein(p, p, 1.0) - 1.0));
    if (q > 0) worst = std::max(worst, std::abs(bernstein(q, p, 0.0)));
    if (q < p) worst = std::max(worst, std::abs(bernstein(q, p, 1.0)));

    // first derivative against the recurrence
    double d1 = bernstein(q, p, t, 1);
    double rec = p * (bernstein(q - 1, p - 1, t) - bernstein(q, p - 1, t));
    worst = std::max(worst, std::abs(d1 - rec) / (1 + p));

    // order-j formula against the iterated recurrence, relative to the
    // leading factor p!/(p-j)!
    int order = std::min(int(oracles::uniform(0, p + 1)), p);
    double fac = 1;
    for (int i = 0; i < order; ++i) fac *= p - i;
    double got = bernstein(q, p, t, order);
    double want = oracles::bernstein_derivative_recurrence(q, p, t, order);
    worst = std::max(worst, std::abs(got - want) / (fac + std::abs(want)));
  }
  bool pass = worst <= 1e-12 && sw.seconds() <= 1;
  CHECK(worst <= 1e-12);
  CHECK(sw.seconds() <= 1);
  report(3, "bernstein identities", pass, sw.seconds(), "max defect " + fmt17(worst));
}

TEST_CASE("criterion 4: corner rounding of a reversing midline") {
  Stopwatch sw;
  auto curve = PiecewiseAffineCurve::from_slopes({e1, e2, -1.0 * e2, e3}, {1, 1, 1, 1});
  PiecewiseAffineCurve looped = insert_loops(curve, 0.6);

  const int k = 3;
  bool junctions_ok = true, affine_ok = true, bounds_ok = true;
  std::vector<double> etas, h1s;
  for (int ke = 3; ke <= 9; ++ke) {
    double eta = std::pow(2.0, -ke);
    SmoothCurve smooth = mollify(looped, k, eta);

    for (double edge : smooth.breakpoints()) {
      if (edge <= 0 || edge >= looped.length()) continue;
      for (int order = 0; order <= k; ++order) {
        Vec3 lhs = smooth.derivative(edge - 1e-12, order);
        Vec3 rhs = smooth.derivative(edge + 1e-12, order);
        if (norm(lhs - rhs) > 1e-8 * (1 + std::max(norm(lhs), norm(rhs))))
          junctions_ok = false;
      }
    }
    // affinity away from the corner windows
    for (std::size_t n = 0; n < looped.segments(); ++n) {
      double mid = 0.5 * (looped.t[n] + looped.t[n + 1]);
      if (norm(smooth.value(mid) - looped.value(mid)) > 1e-12) affine_ok = false;
    }
    if (!(smooth.speed_min() > 0)) bounds_ok = false;
    for (int i = 0; i <= 2000; ++i) {
      double t = looped.length() * i / 2000.0;
      double speed = norm(smooth.derivative(t, 1));
      if (speed < smooth.speed_min() - 1e-9 || speed > smooth.speed_max() + 1e-9)
        bounds_ok = false;
    }
    etas.push_back(eta);
    h1s.push_back(h1_distance(looped.sample(20001), smooth.sample(20001)));
  }
  double slope = rate_fit(etas, h1s);
  bool pass =
      junctions_ok && affine_ok && bounds_ok && slope >= 0.45 && sw.seconds() <= 10;
  CHECK(junctions_ok);
  CHECK(affine_ok);
  CHECK(bounds_ok);
  CHECK(slope >= 0.45);
  CHECK(sw.seconds() <= 10);
  report(4, "corner rounding", pass, sw.seconds(), "H1 slope " + fmt17(slope));
}

TEST_CASE("criterion 5: restored incompressibility of the composed tube") {
  Stopwatch sw;
  auto frame = two_segment_frame();
  BoxGrid grid(frame->curve().length(), 129, 17, 33);
  auto tube = std::make_shared<TubeDeformation>(frame, std::pow(2.0, -6), grid);
  PerturbationField pert = inner_perturbation(*tube, grid, 1.0);
  auto composed = std::make_shared<ComposedDeformation>(tube);
  double fd = det_check(*composed, grid, 1e-4);
  bool pass = fd <= 1e-6 && pert.residual_max <= 1e-9 && sw.seconds() <= 60;
  CHECK(fd <= 1e-6);
  CHECK(pert.residual_max <= 1e-9);
  CHECK(sw.seconds() <= 60);
  report(5, "incompressibility restored", pass, sw.seconds(),
         "max FD |det-1| " + fmt17(fd));
}

TEST_CASE("criterion 6: perturbation rates for tube and path inputs") {
  Stopwatch sw;
  auto frame = two_segment_frame();
  BoxGrid tgrid(frame->curve().length(), 33, 5, 17);
  std::vector<double> eps_t, err_t;
  for (int ke = 3; ke <= 9; ++ke) {
    double e = std::pow(2.0, -ke);
    TubeDeformation tube(frame, e, tgrid);
    PerturbationField pert = inner_perturbation(tube, tgrid, 1.0);
    eps_t.push_back(e);
    err_t.push_back(pert.c1_err);
  }
  double tube_slope = rate_fit(eps_t, err_t);

  const double beta = 0.2;
  auto pw = PiecewiseAffineCurve::from_slopes({e1, e2}, {1, 1});
  auto sections = optimal_cross_sections({e1, e2}, StoredDensity::single_well());
  BoxGrid pgrid(2.0, 33, 5, 17);
  std::vector<double> eps_p, err_p;
  for (int ke = 7; ke <= 13; ++ke) {
    double e = std::pow(2.0, -ke);
    PathDeformation path(pw, sections, Manifold::SO3, beta, e, pgrid);
    PerturbationField pert = inner_perturbation(path, pgrid, 1 - 2 * beta);
    eps_p.push_back(e);
    err_p.push_back(pert.c1_err);
  }
  double path_slope = rate_fit(eps_p, err_p);

  bool pass = tube_slope >= 1.0 - 0.2 && path_slope >= 1 - 2 * beta - 0.2 &&
              sw.seconds() <= 300;
  CHECK(tube_slope >= 0.8);
  CHECK(path_slope >= 1 - 2 * beta - 0.2);
  CHECK(sw.seconds() <= 300);
  report(6, "perturbation rates", pass, sw.seconds(),
         "tube slope " + fmt17(tube_slope) + ", path slope " + fmt17(path_slope));
}

TEST_CASE("criterion 7: string-regime energies approach the limit") {
  Stopwatch sw;

  // stretched midline under the quadratic density: finite limit 5 L
  ExperimentConfig stretch = parse_config(
      "model = frobenius\n"
      "slope = 2 0 0\n"
      "length = 1\n"
      "eps_pow_from = -3\n"
      "eps_pow_to = -7\n"
      "grid_n1 = 65\ngrid_n2 = 9\ngrid_n3 = 17\n"
      "quad_q1 = 6\nquad_q2 = 6\nquad_q3 = 6\n"
      "r_samples = 160\n"
      "run_detcheck = 0\n");
  auto stretch_records = run_alpha0(stretch);
  bool stretch_ok = !stretch_records.empty();
  double stretch_gap = 1e300;
  for (const auto& r : stretch_records)
    if (r.status != "ok" || r.infinite) stretch_ok = false;
  if (stretch_ok) {
    const auto& last = stretch_records.back();
    stretch_gap = std::abs(last.energy - last.limit) / last.limit;
    stretch_ok = stretch_gap <= 0.05;
  }

  // compressed midline under the single well: limit 0 after relaxation
  ExperimentConfig compress = parse_config(
      "model = single_well_so3\n"
      "slope = 0.5 0 0\n"
      "length = 1\n"
      "eps = 3e-5 1e-5 3e-6 1e-6 3e-7 1e-7\n"
      "grid_n1 = 65\ngrid_n2 = 9\ngrid_n3 = 17\n"
      "quad_q1 = 6\nquad_q2 = 6\nquad_q3 = 6\n"
      "r_samples = 160\n"
      "run_detcheck = 0\n");
  auto compress_records = run_alpha0(compress);
  bool compress_ok = !compress_records.empty();
  double compress_final = 1e300;
  for (const auto& r : compress_records)
    if (r.status != "ok" || r.infinite) compress_ok = false;
  if (compress_ok) {
    compress_final = compress_records.back().energy;
    compress_ok = compress_final <= 0.05 && gap_tail_decreasing(compress_records, 3, 1e-6);
  }

  bool pass = stretch_ok && compress_ok && sw.seconds() <= 600;
  CHECK(stretch_ok);
  CHECK(compress_ok);
  CHECK(sw.seconds() <= 600);
  report(7, "string-regime limit", pass, sw.seconds(),
         "stretch rel gap " + fmt17(stretch_gap) + ", compress final " +
             fmt17(compress_final));
}

TEST_CASE("criterion 8: intermediate-regime decay") {
  Stopwatch sw;

  ExperimentConfig fast = parse_config(
      "model = single_well_so3\n"
      "alpha = 1\n"
      "beta = 0.2\n"
      "curve_file = acceptance_two_rotation.txt\n"
      "eps_pow_from = -7\n"
      "eps_pow_to = -13\n"
      "grid_n1 = 65\ngrid_n2 = 9\ngrid_n3 = 17\n"
      "quad_q1 = 6\nquad_q2 = 6\nquad_q3 = 6\n"
      "r_samples = 160\n"
      "run_detcheck = 0\n");
  {
    Vec3 diag = normalized(Vec3{1, 1, 0});
    auto pw = PiecewiseAffineCurve::from_slopes({e1, diag}, {1, 1});
    write_curve(pw, "acceptance_two_rotation.txt");
  }
  auto fast_records = run_alpha(fast);
  std::vector<double> eps, vals;
  for (const auto& r : fast_records)
    if (r.status == "ok" && std::isfinite(r.energy) && r.energy > 0) {
      eps.push_back(r.eps);
      vals.push_back(r.energy);
    }
  double fast_slope = eps.size() >= 4 ? rate_fit(eps, vals) : -1;
  bool fast_ok = fast_slope >= 2 - 1 - 3 * 0.2 - 0.3;

  ExperimentConfig slow = fast;
  slow.alpha = 0.3;
  slow.beta = 0.4;
  slow.epsilons.clear();
  for (int k = 4; k <= 18; ++k) slow.epsilons.push_back(std::pow(2.0, -k));
  auto slow_records = run_alpha(slow);
  bool slow_ok = true;
  double first = -1, last = -1;
  for (const auto& r : slow_records) {
    if (r.status != "ok" || r.infinite) slow_ok = false;
  }
  if (slow_ok && slow_records.size() >= 2) {
    first = slow_records.front().energy;
    last = slow_records.back().energy;
    slow_ok = last <= 1e-2 * first;
    for (std::size_t i = 1; i < slow_records.size(); ++i)
      if (slow_records[i].energy > slow_records[i - 1].energy * 1.05) slow_ok = false;
  }
  std::remove("acceptance_two_rotation.txt");

  bool pass = fast_ok && slow_ok && sw.seconds() <= 600;
  CHECK(fast_ok);
  CHECK(slow_ok);
  CHECK(sw.seconds() <= 600);
  report(8, "intermediate-regime decay", pass, sw.seconds(),
         "slope " + fmt17(fast_slope) + ", shallow-regime ratio " +
             fmt17(first > 0 ? last / first : -1));
}

TEST_CASE("criterion 9: oracle equivalence") {
  Stopwatch sw;

  // envelopes of synthetic profiles against the pairwise-secant brute force
  double env_gap = 0;
  for (int profile = 0; profile < 10; ++profile) {
    RadialEnvelope env;
    int m = 60;
    for (int i = 0; i < m; ++i) {
      env.r.push_back(0.2 + 3.8 * i / (m - 1));
      double f = 1.5 + std::sin(3 * env.r.back() + profile) +
                 oracles::uniform(0.0, 1.0) * 0.5;
      env.f.push_back(std::max(0.0, f));
    }
    convex_envelope(env);

    std::vector<double> xs, ys;
    for (int i = m; i-- > 0;) {
      xs.push_back(-env.r[i]);
      ys.push_back(env.f[i]);
    }
    for (int i = 0; i < m; ++i) {
      xs.push_back(env.r[i]);
      ys.push_back(env.f[i]);
    }
    std::vector<double> oracle = oracles::secant_envelope(xs, ys);
    for (int i = 0; i < m; ++i)
      env_gap = std::max(env_gap, std::abs(env.fc[i] - oracle[m + i]));
  }

  // descent against the multiresolution grid search
  double reduce_gap = 0;
  const StoredDensity models[] = {StoredDensity::single_well(), StoredDensity::frobenius(),
                                  StoredDensity::double_well(1, 2)};
  for (int i = 0; i < 20; ++i) {
    const StoredDensity& model = models[i % 3];
    double r = 0.4 + 0.15 * i;
    Vec3 xi = r * oracles::random_unit();
    ReducedSample s = reduce_density(model, xi);
    double brute = reduce_density_bruteforce(model, xi);
    reduce_gap = std::max(reduce_gap, std::abs(s.value - brute));
  }

  bool pass = env_gap <= 1e-10 && reduce_gap <= 1e-3 && sw.seconds() <= 300;
  CHECK(env_gap <= 1e-10);
  CHECK(reduce_gap <= 1e-3);
  CHECK(sw.seconds() <= 300);
  report(9, "oracle equivalence", pass, sw.seconds(),
         "envelope gap " + fmt17(env_gap) + ", reduction gap " + fmt17(reduce_gap));
}
