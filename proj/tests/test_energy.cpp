#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "oracles.hpp"
#include "stringlab/energy.hpp"
#include "stringlab/experiment.hpp"
#include "stringlab/io.hpp"
#include "stringlab/matfun.hpp"
#include "stringlab/quadrature.hpp"
#include "stringlab/recovery.hpp"

using namespace stringlab;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (int n : {2, 5, 8, 16}) {
    double wsum = 0;
    for (const auto& q : gauss_legendre(n, -1.0, 3.0)) wsum += q.w;
    CHECK(wsum == doctest::Approx(4.0).epsilon(1e-13));
    // degree 2n-1 monomial on [0,1]
    double acc = 0;
    int d = 2 * n - 1;
    for (const auto& q : gauss_legendre(n, 0.0, 1.0)) acc += q.w * std::pow(q.x, d);
    CHECK(acc == doctest::Approx(1.0 / (d + 1)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive simpson integrates a sharp feature") {
  double got = adaptive_simpson([](double t) { return std::exp(-50 * t * t); }, -1, 1, 1e-12);
  CHECK(got == doctest::Approx(std::sqrt(M_PI / 50)).epsilon(1e-9));
}

TEST_CASE("rigid motions of the straight tube carry zero energy") {
  BoxGrid grid(1.0, 9, 5, 9);
  Mat3 rot = rotation_about({1, 2, 3}, 0.7);
  AffineTube v(rot, Vec3{0.4, -0.1, 0.2}, 0.125, grid);
  EnergyResult e = energy(v, 0.0, StoredDensity::single_well(), Quadrature{4, 4, 4}, 1e-6);
  CHECK(!e.infinite);
  CHECK(std::abs(e.value) < 1e-13);
  // any scaling regime: still zero
  EnergyResult e15 = energy(v, 1.5, StoredDensity::single_well(), Quadrature{4, 4, 4}, 1e-6);
  CHECK(std::abs(e15.value) < 1e-10);
}

TEST_CASE("energy is infinite when the determinant gate fails") {
  BoxGrid grid(1.0, 9, 5, 9);
  AffineTube v(Mat3::diag(2, 1, 1), {}, 0.125, grid);
  EnergyResult e = energy(v, 0.0, StoredDensity::single_well(), Quadrature{4, 4, 4}, 1e-6);
  CHECK(e.infinite);
  CHECK(e.value == kInfiniteEnergy);
  CHECK(e.bad_node.x >= 0);
}

TEST_CASE("limit energy of reference midlines") {
  StoredDensity sw = StoredDensity::single_well();
  RadialEnvelope env = radial_profile(sw, default_radial_grid(0.05, 8.0, 120), ProfileOptions{});
  auto unit = PiecewiseAffineCurve::from_slopes({e1}, {1});
  CHECK(limit_energy(unit, env) <= 1e-8);

  StoredDensity fr = StoredDensity::frobenius();
  std::vector<double> fgrid = default_radial_grid(0.5, 5.0, 80);
  fgrid.push_back(2.0);  // sample the evaluation radius exactly
  std::sort(fgrid.begin(), fgrid.end());
  RadialEnvelope fenv = radial_profile(fr, fgrid, ProfileOptions{});
  auto stretched = PiecewiseAffineCurve::from_slopes({2 * e1}, {1});
  CHECK(limit_energy(stretched, fenv) == doctest::Approx(5.0).epsilon(1e-6));

  // a resting midline costs nothing after relaxation of the single well
  std::vector<Vec3> slopes{Vec3{}};
  std::vector<double> lengths{1.0};
  CHECK(limit_energy(slopes, lengths, env) <= 1e-8);

  // smooth-curve version agrees on an affine curve
  CHECK(limit_energy(as_smooth(stretched), fenv) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("rate fitting: exact power laws, oscillating laws, and guards") {
  std::vector<double> eps, clean, wobbly, flat;
  for (int k = 2; k <= 9; ++k) {
    double e = std::pow(2.0, -k);
    eps.push_back(e);
    clean.push_back(3.7 * e * e);
    wobbly.push_back(2.0 * std::pow(e, 0.7) * (1 + 0.1 * std::sin(std::log(e))));
    flat.push_back(42.0);
  }
  CHECK(rate_fit(eps, clean) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rate_fit(eps, wobbly) == doctest::Approx(0.7).epsilon(0.22));
  CHECK(rate_fit(eps, flat) == doctest::Approx(0.0).epsilon(1e-6));

  std::vector<double> few_eps{0.5, 0.25, 0.125};
  std::vector<double> with_zeros{1.0, 0.0, -1.0};
  CHECK_THROWS_AS(rate_fit(few_eps, with_zeros), std::invalid_argument);
}

TEST_CASE("energy is stable under quadrature refinement") {
  Vec3 diag = normalized(Vec3{1, 1, 0});
  auto pw = PiecewiseAffineCurve::from_slopes({e1, diag}, {1, 1});
  auto curve = std::make_shared<const SmoothCurve>(mollify(pw, 3, 0.1));
  std::vector<Vec3> slopes;
  for (const auto& p : curve->pieces())
    if (p.affine) slopes.push_back(p.slope);
  auto sections = optimal_cross_sections(slopes, StoredDensity::single_well());
  auto frame = std::make_shared<const TailoredFrame>(tailored_frame(curve, sections, 0.1, 0.025));
  BoxGrid grid(2.0, 17, 5, 9);
  auto tube = std::make_shared<TubeDeformation>(frame, 1.0 / 32, grid);
  auto u = std::make_shared<ComposedDeformation>(tube);

  EnergyResult coarse = energy(*u, 0.0, StoredDensity::single_well(), Quadrature{6, 6, 6}, 1e-5);
  EnergyResult fine = energy(*u, 0.0, StoredDensity::single_well(), Quadrature{12, 12, 12}, 1e-5);
  REQUIRE(!coarse.infinite);
  REQUIRE(!fine.infinite);
  CHECK(std::abs(coarse.value - fine.value) <= 0.005 * std::abs(fine.value));
}

TEST_CASE("config parsing: values, dyadic sweeps, and unknown keys") {
  ExperimentConfig cfg = parse_config(
      "# comment\n"
      "model = frobenius\n"
      "alpha = 0\n"
      "slope = 2 0 0\n"
      "length = 1\n"
      "eps_pow_from = -3\n"
      "eps_pow_to = -5\n"
      "quad_q1 = 6\n"
      "det_tol = 1e-5\n");
  CHECK(cfg.model.model == DensityModel::Frobenius);
  CHECK(cfg.epsilons.size() == 3);
  CHECK(cfg.epsilons.front() == doctest::Approx(0.125));
  CHECK(cfg.epsilons.back() == doctest::Approx(0.03125));
  CHECK(cfg.quad.q1 == 6);
  CHECK(cfg.det_tol == doctest::Approx(1e-5));

  CHECK_THROWS_AS(parse_config("unknown_key = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("alpha = 2.5\n"), std::invalid_argument);
}

TEST_CASE("string-regime sweep on a stretched midline approaches the limit") {
  ExperimentConfig cfg = parse_config(
      "model = frobenius\n"
      "slope = 2 0 0\n"
      "length = 1\n"
      "eps = 0.125 0.0625\n"
      "grid_n1 = 17\n"
      "grid_n2 = 5\n"
      "grid_n3 = 9\n"
      "quad_q1 = 6\nquad_q2 = 6\nquad_q3 = 6\n"
      "run_detcheck = 0\n"
      "r_samples = 120\n");
  auto records = run_alpha0(cfg);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    INFO(r.status);
    CHECK(r.status == "ok");
    CHECK(!r.infinite);
    CHECK(r.limit == doctest::Approx(5.0).epsilon(1e-5));
    CHECK(std::abs(r.energy - r.limit) <= 0.01 * r.limit);
  }
}

TEST_CASE("records survive the csv round trip") {
  std::vector<ConvergenceRecord> records(2);
  records[0].eps = 0.125;
  records[0].energy = 4.9999;
  records[0].limit = 5.0;
  records[0].det_fd = 1e-7;
  records[0].phi_c1 = 3e-4;
  records[0].seconds = 1.25;
  records[0].teeth = 3;
  records[1].eps = 0.0625;
  records[1].energy = kInfiniteEnergy;
  records[1].infinite = true;
  records[1].status = "gate";

  std::string path = (std::filesystem::temp_directory_path() / "records_roundtrip.csv").string();
  write_records_csv(records, path);
  auto back = read_records_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].eps == doctest::Approx(0.125));
  CHECK(back[0].energy == doctest::Approx(4.9999));
  CHECK(back[0].teeth == 3);
  CHECK(back[1].infinite);
  CHECK(back[1].status == "gate");
  std::filesystem::remove(path);
}

TEST_CASE("profile csv and field dump are written with headers") {
  StoredDensity fr = StoredDensity::frobenius();
  RadialEnvelope env = radial_profile(fr, {0.5, 1.0, 2.0}, ProfileOptions{});
  auto dir = std::filesystem::temp_directory_path();
  std::string ppath = (dir / "profile_io.csv").string();
  write_profile_csv(env, ppath);
  std::ifstream in(ppath);
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,f,fc,is_contact");
  std::filesystem::remove(ppath);

  BoxGrid grid(1.0, 3, 3, 3);
  AffineTube v(Mat3::identity(), {}, 0.125, grid);
  std::string fpath = (dir / "field_io.txt").string();
  write_field_dump(v, grid, fpath);
  std::ifstream fin(fpath);
  std::getline(fin, header);
  CHECK(header == "x1 x2 x3 u1 u2 u3 det");
  int lines = 0;
  std::string row;
  while (std::getline(fin, row)) ++lines;
  CHECK(lines == 27);
  std::filesystem::remove(fpath);
}
