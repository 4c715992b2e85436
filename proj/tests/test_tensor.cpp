#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stringlab/field.hpp"
#include "stringlab/geometry.hpp"
#include "stringlab/grid.hpp"
#include "stringlab/norms.hpp"
#include "stringlab/svd3.hpp"

using namespace stringlab;

namespace {

// v(x) = (x1 + a x1^2, eps(x2 + b x1 x2), eps x3): nonconstant rescaled
// gradient with simple closed-form partials, for the finite-difference check
class QuadraticTube : public TubeField {
 public:
  QuadraticTube(double a, double b, double eps, BoxGrid grid)
      : TubeField(eps, std::move(grid)), a_(a), b_(b) {}

  DetFiber det_fiber(double x1, double) const override {
    return {(1 + 2 * a_ * x1) * (1 + b_ * x1), 0};
  }

 protected:
  Vec3 value_impl(const Vec3& x) const override {
    return {x.x + a_ * x.x * x.x, eps_ * (x.y + b_ * x.x * x.y), eps_ * x.z};
  }
  Mat3 gradient_impl(const Vec3& x) const override {
    Mat3 g;
    g(0, 0) = 1 + 2 * a_ * x.x;
    g(1, 0) = eps_ * b_ * x.y;
    g(1, 1) = 1 + b_ * x.x;
    g(2, 2) = 1;
    return g;
  }
  Vec3 grad_det_impl(const Vec3& x) const override {
    return {2 * a_ * (1 + b_ * x.x) + b_ * (1 + 2 * a_ * x.x), 0, 0};
  }

 private:
  double a_, b_;
};

}  // namespace

TEST_CASE("rescaled gradient of the identity-like tube is the identity") {
  BoxGrid grid(1, 9, 5, 5);
  AffineTube v(Mat3::identity(), {}, 0.125, grid);
  Mat3 g = rescaled_gradient(v, {0.3, 0.2, -0.4});
  CHECK(norm(g - Mat3::identity()) < 1e-15);
}

TEST_CASE("rescaled gradient of an anisotropic affine tube is its diagonal") {
  BoxGrid grid(1, 9, 5, 5);
  AffineTube v(Mat3::diag(2, 1, 0.5), {}, 0.01, grid);
  Mat3 g = rescaled_gradient(v, {0.5, 0.1, 0.1});
  CHECK(g(0, 0) == doctest::Approx(2));
  CHECK(g(1, 1) == doctest::Approx(1));
  CHECK(g(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("rescaled gradient rejects points outside Q_L'") {
  BoxGrid grid(1, 9, 5, 5);
  AffineTube v(Mat3::identity(), {}, 0.1, grid);
  CHECK_THROWS_AS(rescaled_gradient(v, {1.5, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(v.value({0.5, 1.5, 0}), std::domain_error);
}

TEST_CASE("closed-form rescaled gradients match central finite differences") {
  BoxGrid grid(1, 9, 5, 5);
  QuadraticTube v(0.3, 0.7, 0.0625, grid);
  for (int i = 0; i < 20; ++i) {
    Vec3 x{oracles::uniform(0.1, 0.9), oracles::uniform(-0.4, 0.4),
           oracles::uniform(-0.4, 0.4)};
    Mat3 fd = oracles::fd_rescaled_gradient(v, x, 1e-5);
    CHECK(norm(fd - v.rescaled_gradient_at(x)) < 1e-6);
  }
}

TEST_CASE("det(a | b | a x b / |a x b|^2) = 1 for random non-collinear pairs") {
  for (int i = 0; i < 1000; ++i) {
    Vec3 a = oracles::random_vec(-2, 2);
    Vec3 b = oracles::random_vec(-2, 2);
    Vec3 c = cross(a, b);
    double n2 = norm2(c);
    if (n2 < 1e-6) continue;
    double d = det_cols(a, b, c / n2);
    CHECK(std::abs(d - 1.0) < 1e-12 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("sup norm over samples") {
  std::vector<double> constant(40, -2.5);
  CHECK(sup_norm(constant) == doctest::Approx(2.5));

  std::vector<double> zeros(40, 0.0);
  std::vector<Vec3> zero_grads(40, Vec3{});
  CHECK(sup_norm(zeros, zero_grads, 1) == doctest::Approx(0));

  // f(x) = x1 on [0,1]: |f| max 1 plus |f'| max 1
  std::vector<double> vals;
  std::vector<Vec3> grads;
  for (int i = 0; i <= 32; ++i) {
    vals.push_back(i / 32.0);
    grads.push_back({1, 0, 0});
  }
  CHECK(sup_norm(vals, grads, 1) == doctest::Approx(2.0));

  CHECK_THROWS_AS(sup_norm(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("h1 distance: coincident curves and the linear-vs-zero closed form") {
  SampledCurve a, b;
  int n = 4001;
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    a.t.push_back(t);
    a.u.push_back({t, 0, 0});
    a.du.push_back({1, 0, 0});
    b.t.push_back(t);
    b.u.push_back({});
    b.du.push_back({});
  }
  CHECK(h1_distance(a, a) == doctest::Approx(0));
  // sqrt(int t^2 + int 1) = sqrt(4/3)
  CHECK(h1_distance(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));

  SampledCurve c = a;
  c.t[5] += 1e-3;
  CHECK_THROWS_AS(h1_distance(a, c), std::invalid_argument);
}

TEST_CASE("h1 distance satisfies the triangle inequality on random triples") {
  int n = 101;
  for (int trial = 0; trial < 30; ++trial) {
    SampledCurve a, b, c;
    for (int i = 0; i < n; ++i) {
      double t = double(i) / (n - 1);
      for (SampledCurve* s : {&a, &b, &c}) {
        s->t.push_back(t);
        s->u.push_back(oracles::random_vec(-1, 1));
        s->du.push_back(oracles::random_vec(-1, 1));
      }
    }
    double ab = h1_distance(a, b), bc = h1_distance(b, c), ac = h1_distance(a, c);
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("box grid invariants") {
  CHECK_THROWS_AS(
      [] {
        BoxGrid g;
        g.j_lo = 0.1;  // 0 must lie in J
        g.validate();
      }(),
      std::invalid_argument);
  CHECK_THROWS_AS(
      [] {
        BoxGrid g;
        g.jp_hi = 0.5;  // closure(J) must be inside interior of J'
        g.validate();
      }(),
      std::invalid_argument);
  BoxGrid g(2.0, 65, 9, 17);
  CHECK(g.x1(0) == 0);
  CHECK(g.x1(g.n1 - 1) == doctest::Approx(2.0));
  CHECK(g.contains({1, 0.5, -0.5}));
  CHECK(!g.contains({1, 0.6, 0}));
  CHECK(g.contains_prime({1, 0.6, 0}));
}

TEST_CASE("singular values and rotation distance") {
  // dist^2(diag(2,1,1), SO(3)) = 1 via the singular values (2,1,1)
  CHECK(dist2_so3(Mat3::diag(2, 1, 1)) == doctest::Approx(1.0));
  // orientation-reversing diagonal: nearest rotation flips one more axis
  CHECK(dist2_so3(Mat3::diag(1, 1, -1)) == doctest::Approx(4.0));
  Singular3 s = singular_values(Mat3::diag(-3, 0.5, 2));
  CHECK(s.s1 == doctest::Approx(3));
  CHECK(s.s2 == doctest::Approx(2));
  CHECK(s.s3 == doctest::Approx(0.5));
}
