#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "stringlab/density.hpp"
#include "stringlab/matfun.hpp"

using namespace stringlab;

TEST_CASE("stored densities at reference matrices") {
  StoredDensity sw = StoredDensity::single_well();
  CHECK(eval_w0(sw, Mat3::identity()) == doctest::Approx(0));
  // singular values (2,1,1): sum of squared gaps is 1
  CHECK(eval_w0(sw, Mat3::diag(2, 1, 1)) == doctest::Approx(1.0));

  StoredDensity fr = StoredDensity::frobenius();
  CHECK(eval_w0(fr, Mat3::identity()) == doctest::Approx(3.0));

  Mat3 bad = Mat3::identity();
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(eval_w0(sw, bad), std::invalid_argument);
}

TEST_CASE("constrained density is infinite off the unit-determinant set") {
  StoredDensity sw = StoredDensity::single_well();
  CHECK(eval_w(sw, Mat3::identity(), 0.0) == doctest::Approx(0));
  CHECK(eval_w(sw, Mat3::diag(2, 1, 1), 0.5) == kInfiniteEnergy);
  StoredDensity fr = StoredDensity::frobenius();
  CHECK(eval_w(fr, Mat3::diag(2, 1, 0.5), 0.0) == doctest::Approx(5.25));
  CHECK_THROWS_AS(eval_w(sw, Mat3::identity(), -1.0), std::invalid_argument);
}

TEST_CASE("declared growth classes hold on random samples") {
  check_growth_class(StoredDensity::single_well());
  check_growth_class(StoredDensity::frobenius());
  check_growth_class(StoredDensity::double_well(1, 2));
}

TEST_CASE("reduced density of the Frobenius model has the closed form |xi|^2 + 2/|xi|") {
  StoredDensity fr = StoredDensity::frobenius();
  for (double r : {0.3, 1.0, 2.0, 4.5}) {
    Vec3 xi = r * normalized(Vec3{1, -0.4, 0.2});
    ReducedSample s = reduce_density(fr, xi);
    CHECK(s.value == doctest::Approx(r * r + 2 / r).epsilon(1e-8));
    CHECK(std::abs(det(with_first_column(xi, s.cross_section)) - 1.0) < 1e-10);
  }
}

TEST_CASE("reduced density of the single well vanishes at unit speed with the trivial frame") {
  StoredDensity sw = StoredDensity::single_well();
  ReducedSample s = reduce_density(sw, e1);
  CHECK(s.value < 1e-10);
  CHECK(norm(s.cross_section.a1 - e2) < 1e-6);
  CHECK(norm(s.cross_section.a2 - e3) < 1e-6);
  CHECK(s.grad_norm < 1e-8 * (1 + s.value));
}

TEST_CASE("reduced density at zero reports the infinite marker") {
  CHECK(reduce_density(StoredDensity::single_well(), Vec3{}).value == kInfiniteEnergy);
}

TEST_CASE("descent agrees with the multiresolution grid oracle") {
  StoredDensity sw = StoredDensity::single_well();
  Vec3 xi = 2 * e1;
  ReducedSample s = reduce_density(sw, xi);
  double brute = reduce_density_bruteforce(sw, xi);
  CHECK(std::abs(s.value - brute) < 1e-3);

  StoredDensity dw = StoredDensity::double_well(1, 2);
  Vec3 xi2 = 1.4 * normalized(Vec3{0.5, 1, -0.2});
  ReducedSample s2 = reduce_density(dw, xi2);
  double brute2 = reduce_density_bruteforce(dw, xi2);
  CHECK(std::abs(s2.value - brute2) < 1e-3);
}

TEST_CASE("radial profile values at reference radii") {
  ProfileOptions opts;
  StoredDensity fr = StoredDensity::frobenius();
  RadialEnvelope env = radial_profile(fr, {0.5, 1.0, 2.0, 3.0}, opts);
  CHECK(env.profile_at(1.0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(env.profile_at(2.0) == doctest::Approx(5.0).epsilon(1e-7));

  StoredDensity sw = StoredDensity::single_well();
  RadialEnvelope senv = radial_profile(sw, {0.5, 0.8, 1.0, 1.3, 1.7, 2.2}, opts);
  CHECK(senv.profile_at(1.0) < 1e-9);
  for (double r : {1.3, 1.7, 2.2}) CHECK(senv.profile_at(r) > 1e-3);
}

TEST_CASE("double-well reduced profile vanishes exactly at the declared radii") {
  StoredDensity dw = StoredDensity::double_well(1, 2);
  RadialEnvelope env = radial_profile(dw, {0.6, 1.0, 1.5, 2.0, 2.5}, ProfileOptions{});
  CHECK(env.profile_at(1.0) < 1e-9);
  CHECK(env.profile_at(2.0) < 1e-9);
  CHECK(env.profile_at(1.5) > 1e-3);
  CHECK(env.profile_at(0.6) > 1e-3);
}

TEST_CASE("growth sandwich holds for computed reduced samples") {
  for (const StoredDensity& d :
       {StoredDensity::single_well(), StoredDensity::frobenius(),
        StoredDensity::double_well(1, 2)}) {
    for (int i = 0; i < 6; ++i) {
      double r = oracles::uniform(0.3, 4.0);
      Vec3 xi = r * oracles::random_unit();
      ReducedSample s = reduce_density(d, xi);
      CHECK(s.value >= d.c2 * r * r - d.C2 - 1e-6);
      CHECK(s.value <= d.C2 * (r * r + 2 / r + 1) + 1e-6);
    }
  }
}

TEST_CASE("reduced density is rotation invariant for frame-indifferent models") {
  StoredDensity sw = StoredDensity::single_well();
  for (int i = 0; i < 5; ++i) {
    Vec3 xi = oracles::uniform(0.4, 3.0) * oracles::random_unit();
    Mat3 rot = rotation_about(oracles::random_unit(), oracles::uniform(0.1, 3.0));
    double a = reduce_density(sw, xi).value;
    double b = reduce_density(sw, rot * xi).value;
    CHECK(std::abs(a - b) <= 1e-6 * (1 + std::abs(a)));
  }
}

TEST_CASE("convex envelope of the Frobenius profile: convex above unit speed, flat below") {
  StoredDensity fr = StoredDensity::frobenius();
  std::vector<double> grid = default_radial_grid(0.5, 5.0, 60);
  RadialEnvelope env = radial_profile(fr, grid, ProfileOptions{});
  for (std::size_t i = 0; i < env.r.size(); ++i) {
    if (env.r[i] >= 1.0) {
      // f is convex here, so the envelope touches the profile
      CHECK(env.fc[i] == doctest::Approx(env.f[i]).epsilon(1e-7));
    } else {
      // below the minimum the even-extension hull is the flat bridge at f(1)
      CHECK(env.fc[i] == doctest::Approx(3.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("single-well envelope vanishes on the unit ball") {
  StoredDensity sw = StoredDensity::single_well();
  RadialEnvelope env =
      radial_profile(sw, default_radial_grid(0.05, 8.0, 160), ProfileOptions{});
  for (std::size_t i = 0; i < env.r.size(); ++i) {
    if (env.r[i] <= 1.0) CHECK(env.fc[i] <= 1e-8);
    if (env.r[i] >= 1.1) CHECK(env.fc[i] >= 1e-4);
  }
  auto r0 = zero_level_radius(env);
  REQUIRE(r0.has_value());
  CHECK(*r0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("double-well envelope bridges the wells with a contact segment") {
  StoredDensity dw = StoredDensity::double_well(1, 2);
  std::vector<double> grid = default_radial_grid(0.3, 4.0, 80);
  grid.push_back(2.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             grid.end());
  RadialEnvelope env = radial_profile(dw, grid, ProfileOptions{});
  for (std::size_t i = 0; i < env.r.size(); ++i)
    if (env.r[i] >= 1.0 && env.r[i] <= 2.0) CHECK(env.fc[i] <= 1e-8);
  bool found = false;
  for (const auto& seg : env.contacts)
    if (std::abs(seg.r1 - 1.0) < 0.05 && std::abs(seg.r2 - 2.0) < 0.05) found = true;
  CHECK(found);
  auto r0 = zero_level_radius(env);
  REQUIRE(r0.has_value());
  CHECK(*r0 == doctest::Approx(2.0).epsilon(0.02));

  // pairwise-secant brute force over the mirrored samples
  std::vector<double> xs, ys;
  for (std::size_t i = env.r.size(); i-- > 0;) {
    xs.push_back(-env.r[i]);
    ys.push_back(env.f[i]);
  }
  for (std::size_t i = 0; i < env.r.size(); ++i) {
    xs.push_back(env.r[i]);
    ys.push_back(env.f[i]);
  }
  std::vector<double> oracle = oracles::secant_envelope(xs, ys);
  for (std::size_t i = 0; i < env.r.size(); ++i)
    CHECK(std::abs(env.fc[i] - oracle[env.r.size() + i]) < 1e-10);
}

TEST_CASE("envelope is idempotent") {
  StoredDensity sw = StoredDensity::single_well();
  RadialEnvelope env =
      radial_profile(sw, default_radial_grid(0.1, 4.0, 80), ProfileOptions{});
  RadialEnvelope again = env;
  again.f = env.fc;
  convex_envelope(again);
  for (std::size_t i = 0; i < env.r.size(); ++i)
    CHECK(std::abs(again.fc[i] - env.fc[i]) < 1e-12 * (1 + std::abs(env.fc[i])));
}

TEST_CASE("envelope evaluation: interpolation, extension to zero, range errors") {
  StoredDensity sw = StoredDensity::single_well();
  RadialEnvelope env =
      radial_profile(sw, default_radial_grid(0.05, 8.0, 120), ProfileOptions{});
  CHECK(eval_wbar_c(env, e1) <= 1e-8);
  CHECK(eval_wbar_c(env, 0.3 * e2) <= 1e-8);
  CHECK(eval_wbar_c(env, Vec3{}) <= 1e-8);  // extension across zero by evenness
  CHECK_THROWS_AS(eval_wbar_c(env, 9.0 * e1), std::out_of_range);

  StoredDensity fr = StoredDensity::frobenius();
  // sample the evaluation radius exactly: between samples the envelope is a
  // chord of the convex profile
  std::vector<double> fgrid = default_radial_grid(0.5, 5.0, 60);
  fgrid.push_back(2.0);
  std::sort(fgrid.begin(), fgrid.end());
  fgrid.erase(std::unique(fgrid.begin(), fgrid.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              fgrid.end());
  RadialEnvelope fenv = radial_profile(fr, fgrid, ProfileOptions{});
  CHECK(eval_wbar_c(fenv, 2 * e1) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(!zero_level_radius(fenv).has_value());
}
